/*
 Copyright 2026 The lightaug Authors.
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "lightaug/transforms.hpp"

#include <algorithm>
#include <cmath>

using namespace std;
using namespace lightaug::imaging;

namespace lightaug
{
    namespace
    {
        constexpr int inpaint_margin = 6;

        bool overlaps(const LightBox& a, const LightBox& b)
        {
            return min(a.x2, b.x2) > max(a.x1, b.x1) && min(a.y2, b.y2) > max(a.y1, b.y1);
        }

        // A candidate position is free when it stays in frame and overlaps no
        // box except the one at `ignore`.
        bool position_free(const LightBox& cand, const vector<LightBox>& boxes, size_t ignore, double w, double h)
        {
            if (!box_inside(cand, w, h))
            {
                return false;
            }
            for (size_t j = 0; j < boxes.size(); ++j)
            {
                if (j != ignore && overlaps(cand, boxes[j]))
                {
                    return false;
                }
            }
            return true;
        }

        // Fills the pixels under rect from a small neighbourhood around it.
        void fill_hole(RasterImage& img, const PixelRect& rect)
        {
            PixelRect area;
            area.x0 = max(rect.x0 - inpaint_margin, 0);
            area.y0 = max(rect.y0 - inpaint_margin, 0);
            area.x1 = min(rect.x1 + inpaint_margin, static_cast<int>(img.width()));
            area.y1 = min(rect.y1 + inpaint_margin, static_cast<int>(img.height()));
            RasterImage local = crop(img, area);
            Mask        mask(local.width(), local.height());
            mask.fill_rect(rect.x0 - area.x0, rect.y0 - area.y0, rect.x1 - area.x0, rect.y1 - area.y0);
            try
            {
                paste(img, inpaint(local, mask), area.x0, area.y0);
            }
            catch (const Error& e)
            {
                // The box covers the whole frame: nothing to fill from.
                if (e.code() != Errc::mask_covers_image)
                {
                    throw;
                }
            }
        }

        TransformOutcome start(TransformKind kind, const LabeledImage& input, uint64_t seed)
        {
            TransformOutcome out;
            out.image = input;
            out.kind  = kind;
            out.seed  = seed;
            return out;
        }

        void require_lights(const LabeledImage& input, TransformKind kind)
        {
            if (input.lights.empty())
            {
                throw Error(Errc::no_lights,
                            string(to_string(kind)) + ": image '" + input.id + "' has no traffic lights");
            }
        }
    }

    string_view to_string(LightAction action)
    {
        switch (action)
        {
        case LightAction::Unchanged: return "unchanged";
        case LightAction::Moved: return "moved";
        case LightAction::Recolored: return "recolored";
        case LightAction::Rotated: return "rotated";
        case LightAction::Added: return "added";
        case LightAction::Scaled: return "scaled";
        case LightAction::Skipped: return "skipped";
        }
        return "?";
    }

    optional<LightAction> parse_light_action(string_view name)
    {
        for (auto a : {LightAction::Unchanged, LightAction::Moved, LightAction::Recolored, LightAction::Rotated,
                       LightAction::Added, LightAction::Scaled, LightAction::Skipped})
        {
            if (to_string(a) == name)
            {
                return a;
            }
        }
        return nullopt;
    }

    bool touched(const LightNote& note)
    {
        return note.action != LightAction::Unchanged && note.action != LightAction::Skipped;
    }

    vector<bool> touched_outputs(TransformKind kind, span<const LightNote> notes)
    {
        vector<bool> out;
        if (family(kind) != TransformFamily::Light)
        {
            return out;
        }
        if (kind == TransformKind::AD)
        {
            for (const auto& n : notes)
            {
                if (n.action == LightAction::Unchanged)
                {
                    out.push_back(false);
                }
            }
            for (const auto& n : notes)
            {
                if (n.action == LightAction::Added)
                {
                    out.push_back(true);
                }
            }
            return out;
        }
        for (const auto& n : notes)
        {
            out.push_back(touched(n));
        }
        return out;
    }

    AugmentedLabels TransformOutcome::labels() const { return {annotation_of(image), kind, seed, notes}; }

    namespace geometry
    {
        LightBox shift_x(const LightBox& b, double dx)
        {
            LightBox out = b;
            out.x1 += dx;
            out.x2 += dx;
            return out;
        }

        LightBox rotate_box(const LightBox& b)
        {
            const Point  c      = box_center(b);
            const double half_w = (b.x2 - b.x1) / 2.0;
            const double half_h = (b.y2 - b.y1) / 2.0;
            return {c.x - half_h, c.y - half_w, c.x + half_h, c.y + half_w, b.state};
        }

        Point scale_point(Point p, double width, double height, const TransformParams& params)
        {
            const double sx = width / (width + params.sc_pad_w);
            const double sy = height / (height + params.sc_pad_h);
            return {(p.x + params.sc_pad_w / 2.0) * sx, (p.y + params.sc_pad_h / 2.0) * sy};
        }

        LightBox scale_box(const LightBox& b, double width, double height, const TransformParams& params)
        {
            const double sx     = width / (width + params.sc_pad_w);
            const double sy     = height / (height + params.sc_pad_h);
            const double half_w = (b.x2 - b.x1) / 2.0 * sx;
            const double half_h = (b.y2 - b.y1) / 2.0 * sy;
            Point        c      = box_center(b);
            if (params.sc_label_mode == ScaleLabelMode::ImageAffine)
            {
                c = scale_point(c, width, height, params);
            }
            return {c.x - half_w, c.y - half_h, c.x + half_w, c.y + half_h, b.state};
        }
    }

    LightState swap_color(LightState s)
    {
        switch (s)
        {
        case LightState::Stop: return LightState::Go;
        case LightState::Go: return LightState::Stop;
        case LightState::StopLeft: return LightState::GoLeft;
        case LightState::GoLeft: return LightState::StopLeft;
        case LightState::Warning: return LightState::Warning;
        }
        return s;
    }

    LightState dearrow(LightState s)
    {
        switch (s)
        {
        case LightState::StopLeft: return LightState::Stop;
        case LightState::GoLeft: return LightState::Go;
        default: return s;
        }
    }

    vector<LightBox> co_transform_labels(TransformKind kind,
                                         span<const LightBox> input,
                                         span<const LightNote> notes,
                                         uint32_t width,
                                         uint32_t height,
                                         const TransformParams& params)
    {
        vector<LightBox> out(input.begin(), input.end());
        if (family(kind) != TransformFamily::Light)
        {
            return out;
        }
        for (const LightNote& note : notes)
        {
            if (note.source >= input.size())
            {
                throw Error(Errc::invalid_argument, "co_transform_labels: note refers to a missing light");
            }
            const LightBox& src = input[note.source];
            switch (note.action)
            {
            case LightAction::Unchanged:
            case LightAction::Skipped: break;
            case LightAction::Recolored: out[note.source].state = swap_color(src.state); break;
            case LightAction::Moved: out[note.source] = geometry::shift_x(src, note.offset); break;
            case LightAction::Added: out.push_back(geometry::shift_x(src, note.offset)); break;
            case LightAction::Scaled: out[note.source] = geometry::scale_box(src, width, height, params); break;
            case LightAction::Rotated:
            {
                LightBox r = geometry::rotate_box(src);
                r.state    = dearrow(src.state);
                if (note.clamped)
                {
                    auto c = clamp_box(r, width, height);
                    if (!c)
                    {
                        throw Error(Errc::invalid_argument, "co_transform_labels: clamped rotation left the frame");
                    }
                    r = *c;
                }
                out[note.source] = r;
                break;
            }
            }
        }
        return out;
    }

    namespace hue_gate
    {
        bool is_red(const Hsv& hsv)
        {
            return (hsv.h >= 330.0 || hsv.h < 30.0) && hsv.s >= min_saturation && hsv.v >= min_value;
        }
        bool is_green(const Hsv& hsv)
        {
            return hsv.h >= 75.0 && hsv.h < 165.0 && hsv.s >= min_saturation && hsv.v >= min_value;
        }
    }

    RasterImage remap_light_hue(const RasterImage& patch)
    {
        RasterImage out = patch;
        auto&       d   = out.data();
        for (size_t i = 0; i < d.size(); i += 3)
        {
            Hsv hsv = rgb_to_hsv({d[i], d[i + 1], d[i + 2]});
            if (hue_gate::is_red(hsv))
            {
                hsv.h = fmod(hsv.h + 120.0, 360.0);
            }
            else if (hue_gate::is_green(hsv))
            {
                hsv.h -= 120.0;
                if (hsv.h < 0)
                {
                    hsv.h += 360.0;
                }
            }
            else
            {
                continue;
            }
            const Rgb px = hsv_to_rgb(hsv);
            d[i]         = px.r;
            d[i + 1]     = px.g;
            d[i + 2]     = px.b;
        }
        return out;
    }

    vector<bool> choose_subset(size_t n, Rng& rng)
    {
        vector<bool> pick(n, false);
        if (n == 0)
        {
            return pick;
        }
        for (;;)
        {
            bool any = false;
            for (size_t i = 0; i < n; ++i)
            {
                pick[i] = rng.bernoulli(0.5);
                any     = any || pick[i];
            }
            if (any)
            {
                return pick;
            }
        }
    }

    TransformOutcome cc_change_color(const LabeledImage& input, uint64_t seed)
    {
        require_lights(input, TransformKind::CC);
        TransformOutcome out = start(TransformKind::CC, input, seed);
        RasterImage&     img = out.image.pixels;
        for (size_t i = 0; i < input.lights.size(); ++i)
        {
            LightBox& light = out.image.lights[i];
            if (light.state == LightState::Warning)
            {
                out.notes.push_back({LightAction::Unchanged, i, 0, false, "warning"});
                continue;
            }
            const PixelRect rect = covering_rect(light, img.width(), img.height());
            if (rect.empty())
            {
                out.notes.push_back({LightAction::Skipped, i, 0, false, "empty_region"});
                continue;
            }
            RasterImage patch = remap_light_hue(crop(img, rect));
            fill_hole(img, rect);
            // Keep the red bulb at the top of vertical lights and at the left of horizontal ones.
            patch = light.width() > light.height() ? flip_horizontal(patch) : flip_vertical(patch);
            img   = poisson_blend(img, Patch::opaque(std::move(patch), rect.x0, rect.y0));
            light.state = swap_color(light.state);
            out.notes.push_back({LightAction::Recolored, i, 0, false, {}});
        }
        return out;
    }

    TransformOutcome mp_move_position(const LabeledImage& input, uint64_t seed)
    {
        require_lights(input, TransformKind::MP);
        TransformOutcome   out  = start(TransformKind::MP, input, seed);
        RasterImage&       img  = out.image.pixels;
        vector<LightBox>&  boxes = out.image.lights;
        const double       W    = img.width();
        const double       H    = img.height();
        Rng                rng(seed);
        const vector<bool> pick = choose_subset(boxes.size(), rng);
        for (size_t i = 0; i < boxes.size(); ++i)
        {
            if (!pick[i])
            {
                out.notes.push_back({LightAction::Unchanged, i, 0, false, {}});
                continue;
            }
            const LightBox b     = boxes[i];
            const double   delta = b.width();
            double         offset = 0;
            if (position_free(geometry::shift_x(b, delta), boxes, i, W, H))
            {
                offset = delta;
            }
            else if (position_free(geometry::shift_x(b, -delta), boxes, i, W, H))
            {
                offset = -delta;
            }
            else
            {
                out.notes.push_back({LightAction::Skipped, i, 0, false, "blocked"});
                continue;
            }
            const PixelRect rect  = covering_rect(b, img.width(), img.height());
            RasterImage     patch = crop(img, rect);
            fill_hole(img, rect);
            paste(img, patch, rect.x0 + static_cast<int>(lround(offset)), rect.y0);
            boxes[i] = geometry::shift_x(b, offset);
            out.notes.push_back({LightAction::Moved, i, offset, false, {}});
        }
        return out;
    }

    TransformOutcome ad_add_lights(const LabeledImage& input, uint64_t seed)
    {
        require_lights(input, TransformKind::AD);
        TransformOutcome  out   = start(TransformKind::AD, input, seed);
        RasterImage&      img   = out.image.pixels;
        vector<LightBox>& boxes = out.image.lights;
        const size_t      n     = input.lights.size();
        const double      W     = img.width();
        const double      H     = img.height();
        for (size_t i = 0; i < n; ++i)
        {
            out.notes.push_back({LightAction::Unchanged, i, 0, false, {}});
        }
        Rng          rng(seed);
        const auto   k_max = max<int64_t>(1, static_cast<int64_t>((n + 1) / 2));
        const auto   k     = rng.uniform_int(1, k_max);
        for (int64_t a = 0; a < k; ++a)
        {
            const auto      s   = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(n) - 1));
            const LightBox& src = input.lights[s];
            const double    w   = src.width();
            double          offset = 0;
            if (position_free(geometry::shift_x(src, w), boxes, boxes.size(), W, H))
            {
                offset = w;
            }
            else if (position_free(geometry::shift_x(src, -w), boxes, boxes.size(), W, H))
            {
                offset = -w;
            }
            else
            {
                out.notes.push_back({LightAction::Skipped, s, 0, false, "blocked"});
                continue;
            }
            const PixelRect rect = covering_rect(src, img.width(), img.height());
            paste(img, crop(input.pixels, rect), rect.x0 + static_cast<int>(lround(offset)), rect.y0);
            boxes.push_back(geometry::shift_x(src, offset));
            out.notes.push_back({LightAction::Added, s, offset, false, {}});
        }
        return out;
    }

    TransformOutcome rt_rotate(const LabeledImage& input, uint64_t seed)
    {
        require_lights(input, TransformKind::RT);
        TransformOutcome   out   = start(TransformKind::RT, input, seed);
        RasterImage&       img   = out.image.pixels;
        vector<LightBox>&  boxes = out.image.lights;
        Rng                rng(seed);
        const vector<bool> pick  = choose_subset(boxes.size(), rng);
        for (size_t i = 0; i < boxes.size(); ++i)
        {
            if (!pick[i])
            {
                out.notes.push_back({LightAction::Unchanged, i, 0, false, {}});
                continue;
            }
            const LightBox b = boxes[i];
            LightBox       r = geometry::rotate_box(b);
            r.state          = dearrow(b.state);
            bool clamped     = false;
            if (!box_inside(r, img.width(), img.height()))
            {
                auto c = clamp_box(r, img.width(), img.height());
                if (!c)
                {
                    out.notes.push_back({LightAction::Skipped, i, 0, false, "out_of_frame"});
                    continue;
                }
                r       = *c;
                clamped = true;
            }
            const PixelRect rect = covering_rect(b, img.width(), img.height());
            RasterImage     patch = crop(img, rect);
            fill_hole(img, rect);
            // Horizontal lights turn clockwise, vertical ones counterclockwise,
            // which keeps the red bulb on the top or left.
            patch = b.width() > b.height() ? rotate90_clockwise(patch) : rotate90_counterclockwise(patch);
            const Point c = box_center(b);
            paste(img, patch, static_cast<int>(lround(c.x - patch.width() / 2.0)),
                  static_cast<int>(lround(c.y - patch.height() / 2.0)));
            boxes[i] = r;
            out.notes.push_back({LightAction::Rotated, i, 0, clamped, clamped ? "clamped" : ""});
        }
        return out;
    }

    TransformOutcome sc_scale(const LabeledImage& input, const TransformParams& params)
    {
        params.validate();
        TransformOutcome out = start(TransformKind::SC, input, 0);
        const RasterImage& src = input.pixels;
        const uint32_t W   = src.width();
        const uint32_t H   = src.height();
        const auto     pad_x = static_cast<uint32_t>(lround(params.sc_pad_w / 2.0));
        const auto     pad_y = static_cast<uint32_t>(lround(params.sc_pad_h / 2.0));
        const uint32_t CW  = W + 2 * pad_x;
        const uint32_t CH  = H + 2 * pad_y;

        RasterImage canvas(CW, CH);
        paste(canvas, src, static_cast<int>(pad_x), static_cast<int>(pad_y));
        Mask band(CW, CH, 1);
        for (uint32_t y = pad_y; y < pad_y + H; ++y)
        {
            fill_n(band.data.begin() + static_cast<ptrdiff_t>(y) * CW + pad_x, W, uint8_t{0});
        }
        canvas = inpaint(canvas, band, {10, 0.5});

        // Bilinear resample of the canvas back to W x H with pixel centers aligned.
        RasterImage& dst = out.image.pixels;
        const double sx  = double(CW) / W;
        const double sy  = double(CH) / H;
        for (uint32_t v = 0; v < H; ++v)
        {
            const double fy = clamp((v + 0.5) * sy - 0.5, 0.0, double(CH - 1));
            const auto   y0 = static_cast<uint32_t>(fy);
            const auto   y1 = min(y0 + 1, CH - 1);
            const double ty = fy - y0;
            for (uint32_t u = 0; u < W; ++u)
            {
                const double fx = clamp((u + 0.5) * sx - 0.5, 0.0, double(CW - 1));
                const auto   x0 = static_cast<uint32_t>(fx);
                const auto   x1 = min(x0 + 1, CW - 1);
                const double tx = fx - x0;
                const uint8_t* p00 = canvas.pixel(x0, y0);
                const uint8_t* p10 = canvas.pixel(x1, y0);
                const uint8_t* p01 = canvas.pixel(x0, y1);
                const uint8_t* p11 = canvas.pixel(x1, y1);
                uint8_t*       o   = dst.pixel(u, v);
                for (int ch = 0; ch < 3; ++ch)
                {
                    const double top = p00[ch] + (p10[ch] - p00[ch]) * tx;
                    const double bot = p01[ch] + (p11[ch] - p01[ch]) * tx;
                    o[ch]            = static_cast<uint8_t>(lround(top + (bot - top) * ty));
                }
            }
        }

        for (size_t i = 0; i < input.lights.size(); ++i)
        {
            out.image.lights[i] = geometry::scale_box(input.lights[i], W, H, params);
            out.notes.push_back({LightAction::Scaled, i, 0, false, {}});
        }
        out.drawn.emplace_back("sc_pad_w", params.sc_pad_w);
        out.drawn.emplace_back("sc_pad_h", params.sc_pad_h);
        return out;
    }

    TransformOutcome apply(TransformKind kind, const LabeledImage& input, const TransformParams& params, uint64_t seed)
    {
        params.validate();
        if (input.pixels.empty())
        {
            throw Error(Errc::invalid_argument, "apply: image '" + input.id + "' has no pixels");
        }
        for (const LightBox& b : input.lights)
        {
            if (!b.valid())
            {
                throw Error(Errc::invalid_argument, "apply: image '" + input.id + "' has a degenerate box");
            }
        }
        if (family(kind) == TransformFamily::Light)
        {
            require_lights(input, kind);
        }

        const RasterImage& px = input.pixels;
        TransformOutcome   out;
        switch (kind)
        {
        case TransformKind::RN:
            out              = start(kind, input, seed);
            out.image.pixels = render_rain(px, params.rain_drop_size, params.rain_speed, seed);
            break;
        case TransformKind::SW:
            out              = start(kind, input, seed);
            out.image.pixels = render_snow(px, params.snow_severity, seed);
            break;
        case TransformKind::FG:
            out              = start(kind, input, seed);
            out.image.pixels = render_fog(px, params.fog_severity, seed);
            break;
        case TransformKind::LF:
        {
            Rng         rng(seed);
            const Point center{rng.uniform(0.1, 0.9) * px.width(), rng.uniform(0.05, 0.45) * px.height()};
            out              = start(kind, input, seed);
            out.image.pixels = render_flare(px, center, splitmix64(seed));
            out.drawn        = {{"flare_x", center.x}, {"flare_y", center.y}, {"brightness_lift", flare_brightness_lift}};
            break;
        }
        case TransformKind::OE:
            out              = start(kind, input, seed);
            out.image.pixels = adjust_lightness_hsl(px, params.oe_severity, Exposure::Brighten);
            out.drawn        = {{"lightness_gain", exposure_gain(params.oe_severity)}};
            break;
        case TransformKind::UE:
            out              = start(kind, input, seed);
            out.image.pixels = adjust_lightness_hsl(px, params.ue_severity, Exposure::Darken);
            out.drawn        = {{"lightness_gain", -exposure_gain(params.ue_severity)}};
            break;
        case TransformKind::MB:
        {
            Rng          rng(seed);
            const double angle = rng.uniform(-15.0, 15.0);
            out                = start(kind, input, seed);
            out.image.pixels   = convolve_motion_blur(px, params.mb_kernel, angle);
            out.drawn          = {{"mb_angle_deg", angle}};
            break;
        }
        case TransformKind::CC: out = cc_change_color(input, seed); break;
        case TransformKind::MP: out = mp_move_position(input, seed); break;
        case TransformKind::AD: out = ad_add_lights(input, seed); break;
        case TransformKind::RT: out = rt_rotate(input, seed); break;
        case TransformKind::SC:
            out      = sc_scale(input, params);
            out.seed = seed;
            break;
        }
        return out;
    }
}
