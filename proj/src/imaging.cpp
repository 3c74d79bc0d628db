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

#include "lightaug/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lightaug/rng.hpp"

using namespace std;

namespace lightaug::imaging
{
    namespace
    {
        uint8_t to_u8(double v) { return static_cast<uint8_t>(clamp(lround(v), 0L, 255L)); }

        double hue_of(double r, double g, double b, double mx, double delta)
        {
            if (delta <= 0)
            {
                return 0;
            }
            double h;
            if (mx == r)
            {
                h = 60.0 * fmod((g - b) / delta, 6.0);
            }
            else if (mx == g)
            {
                h = 60.0 * ((b - r) / delta + 2.0);
            }
            else
            {
                h = 60.0 * ((r - g) / delta + 4.0);
            }
            if (h < 0)
            {
                h += 360.0;
            }
            if (h >= 360.0)
            {
                h -= 360.0;
            }
            return h;
        }

        // Shared tail of the hexcone inverse: chroma c, hue h, offset m.
        Rgb from_chroma(double h, double c, double m)
        {
            h           = fmod(h, 360.0);
            if (h < 0)
            {
                h += 360.0;
            }
            const double hp = h / 60.0;
            const double x  = c * (1.0 - fabs(fmod(hp, 2.0) - 1.0));
            double       r = 0, g = 0, b = 0;
            switch (static_cast<int>(hp))
            {
            case 0: r = c, g = x; break;
            case 1: r = x, g = c; break;
            case 2: g = c, b = x; break;
            case 3: g = x, b = c; break;
            case 4: r = x, b = c; break;
            default: r = c, b = x; break;
            }
            return {to_u8((r + m) * 255.0), to_u8((g + m) * 255.0), to_u8((b + m) * 255.0)};
        }

        double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

        // Per-pixel alpha layer composited over the image in one pass.
        struct AlphaLayer
        {
            uint32_t       width;
            uint32_t       height;
            vector<float>  alpha;

            AlphaLayer(uint32_t w, uint32_t h)
                : width(w)
                , height(h)
                , alpha(static_cast<size_t>(w) * h, 0.0f)
            {
            }

            void raise(int x, int y, float a)
            {
                if (x < 0 || y < 0 || x >= static_cast<int>(width) || y >= static_cast<int>(height))
                {
                    return;
                }
                float& dst = alpha[static_cast<size_t>(y) * width + x];
                dst        = max(dst, a);
            }

            /// Anti-aliased thick segment from (ax,ay) to (bx,by).
            void segment(double ax, double ay, double bx, double by, double radius, float peak)
            {
                const int x0 = static_cast<int>(floor(min(ax, bx) - radius - 1));
                const int x1 = static_cast<int>(ceil(max(ax, bx) + radius + 1));
                const int y0 = static_cast<int>(floor(min(ay, by) - radius - 1));
                const int y1 = static_cast<int>(ceil(max(ay, by) + radius + 1));
                const double dx  = bx - ax;
                const double dy  = by - ay;
                const double len2 = dx * dx + dy * dy;
                for (int y = max(y0, 0); y <= min(y1, static_cast<int>(height) - 1); ++y)
                {
                    for (int x = max(x0, 0); x <= min(x1, static_cast<int>(width) - 1); ++x)
                    {
                        const double px = x + 0.5 - ax;
                        const double py = y + 0.5 - ay;
                        double       t  = len2 > 0 ? (px * dx + py * dy) / len2 : 0.0;
                        t               = clamp(t, 0.0, 1.0);
                        const double ex = px - t * dx;
                        const double ey = py - t * dy;
                        const double d  = sqrt(ex * ex + ey * ey);
                        const double cov = clamp(radius + 0.5 - d, 0.0, 1.0);
                        if (cov > 0)
                        {
                            raise(x, y, static_cast<float>(peak * cov));
                        }
                    }
                }
            }

            RasterImage composite(const RasterImage& img, Rgb color) const
            {
                RasterImage out = img;
                auto&       d   = out.data();
                const array<double, 3> c = {double(color.r), double(color.g), double(color.b)};
                for (size_t i = 0; i < alpha.size(); ++i)
                {
                    const double a = alpha[i];
                    if (a <= 0)
                    {
                        continue;
                    }
                    for (size_t ch = 0; ch < 3; ++ch)
                    {
                        const double v    = d[i * 3 + ch];
                        d[i * 3 + ch] = to_u8(v * (1.0 - a) + c[ch] * a);
                    }
                }
                return out;
            }
        };

        // Multi-octave value noise in [0,1] sampled on the pixel grid.
        vector<float> value_noise(uint32_t width, uint32_t height, int octaves, int base_cells, Rng& rng)
        {
            vector<float> out(static_cast<size_t>(width) * height, 0.0f);
            double        amplitude = 1.0;
            double        total     = 0.0;
            int           cells     = base_cells;
            for (int o = 0; o < octaves; ++o)
            {
                const int     gx = cells + 2;
                const int     gy = max(2, static_cast<int>(lround(cells * double(height) / width))) + 2;
                vector<double> lattice(static_cast<size_t>(gx) * gy);
                for (double& v : lattice)
                {
                    v = rng.uniform();
                }
                const double sx = double(gx - 2) / width;
                const double sy = double(gy - 2) / height;
                for (uint32_t y = 0; y < height; ++y)
                {
                    const double fy = (y + 0.5) * sy;
                    const int    iy = static_cast<int>(fy);
                    const double ty = smoothstep(fy - iy);
                    for (uint32_t x = 0; x < width; ++x)
                    {
                        const double fx = (x + 0.5) * sx;
                        const int    ix = static_cast<int>(fx);
                        const double tx = smoothstep(fx - ix);
                        const double v00 = lattice[static_cast<size_t>(iy) * gx + ix];
                        const double v10 = lattice[static_cast<size_t>(iy) * gx + ix + 1];
                        const double v01 = lattice[static_cast<size_t>(iy + 1) * gx + ix];
                        const double v11 = lattice[static_cast<size_t>(iy + 1) * gx + ix + 1];
                        const double top = v00 + (v10 - v00) * tx;
                        const double bot = v01 + (v11 - v01) * tx;
                        out[static_cast<size_t>(y) * width + x] += static_cast<float>(amplitude * (top + (bot - top) * ty));
                    }
                }
                total += amplitude;
                amplitude *= 0.5;
                cells *= 2;
            }
            for (float& v : out)
            {
                v = static_cast<float>(v / total);
            }
            return out;
        }
    }

    Hsv rgb_to_hsv(Rgb px)
    {
        const double r     = px.r / 255.0;
        const double g     = px.g / 255.0;
        const double b     = px.b / 255.0;
        const double mx    = max({r, g, b});
        const double mn    = min({r, g, b});
        const double delta = mx - mn;
        Hsv          out;
        out.v = mx;
        out.s = mx > 0 ? delta / mx : 0.0;
        out.h = hue_of(r, g, b, mx, delta);
        return out;
    }

    Rgb hsv_to_rgb(const Hsv& hsv)
    {
        const double c = hsv.v * hsv.s;
        return from_chroma(hsv.h, c, hsv.v - c);
    }

    Hsl rgb_to_hsl(Rgb px)
    {
        const double r     = px.r / 255.0;
        const double g     = px.g / 255.0;
        const double b     = px.b / 255.0;
        const double mx    = max({r, g, b});
        const double mn    = min({r, g, b});
        const double delta = mx - mn;
        Hsl          out;
        out.l = (mx + mn) / 2.0;
        out.s = delta > 0 ? delta / (1.0 - fabs(2.0 * out.l - 1.0)) : 0.0;
        out.h = hue_of(r, g, b, mx, delta);
        return out;
    }

    Rgb hsl_to_rgb(const Hsl& hsl)
    {
        const double c = (1.0 - fabs(2.0 * hsl.l - 1.0)) * hsl.s;
        return from_chroma(hsl.h, c, hsl.l - c / 2.0);
    }

    void Mask::fill_rect(int x0, int y0, int x1, int y1)
    {
        x0 = max(x0, 0);
        y0 = max(y0, 0);
        x1 = min(x1, static_cast<int>(width));
        y1 = min(y1, static_cast<int>(height));
        for (int y = y0; y < y1; ++y)
        {
            for (int x = x0; x < x1; ++x)
            {
                set(x, y);
            }
        }
    }

    Patch Patch::opaque(RasterImage pixels, int origin_x, int origin_y)
    {
        Patch p;
        p.alpha.assign(static_cast<size_t>(pixels.width()) * pixels.height(), 1.0f);
        p.pixels   = std::move(pixels);
        p.origin_x = origin_x;
        p.origin_y = origin_y;
        return p;
    }

    PixelRect covering_rect(const LightBox& b, uint32_t width, uint32_t height)
    {
        PixelRect r;
        r.x0 = clamp(static_cast<int>(floor(b.x1)), 0, static_cast<int>(width));
        r.y0 = clamp(static_cast<int>(floor(b.y1)), 0, static_cast<int>(height));
        r.x1 = clamp(static_cast<int>(ceil(b.x2)), 0, static_cast<int>(width));
        r.y1 = clamp(static_cast<int>(ceil(b.y2)), 0, static_cast<int>(height));
        return r;
    }

    RasterImage crop(const RasterImage& img, const PixelRect& rect)
    {
        if (rect.empty() || rect.x0 < 0 || rect.y0 < 0 || rect.x1 > static_cast<int>(img.width())
            || rect.y1 > static_cast<int>(img.height()))
        {
            throw Error(Errc::invalid_argument, "crop: rectangle outside image");
        }
        RasterImage out(rect.width(), rect.height());
        for (int y = 0; y < rect.height(); ++y)
        {
            copy_n(img.pixel(rect.x0, rect.y0 + y), static_cast<size_t>(rect.width()) * 3, out.pixel(0, y));
        }
        return out;
    }

    void paste(RasterImage& dst, const RasterImage& src, int x, int y)
    {
        for (uint32_t sy = 0; sy < src.height(); ++sy)
        {
            const int dy = y + static_cast<int>(sy);
            if (dy < 0 || dy >= static_cast<int>(dst.height()))
            {
                continue;
            }
            for (uint32_t sx = 0; sx < src.width(); ++sx)
            {
                const int dx = x + static_cast<int>(sx);
                if (dx < 0 || dx >= static_cast<int>(dst.width()))
                {
                    continue;
                }
                copy_n(src.pixel(sx, sy), 3, dst.pixel(dx, dy));
            }
        }
    }

    RasterImage flip_vertical(const RasterImage& img)
    {
        RasterImage out(img.width(), img.height());
        for (uint32_t y = 0; y < img.height(); ++y)
        {
            copy_n(img.pixel(0, y), static_cast<size_t>(img.width()) * 3, out.pixel(0, img.height() - 1 - y));
        }
        return out;
    }

    RasterImage flip_horizontal(const RasterImage& img)
    {
        RasterImage out(img.width(), img.height());
        for (uint32_t y = 0; y < img.height(); ++y)
        {
            for (uint32_t x = 0; x < img.width(); ++x)
            {
                copy_n(img.pixel(x, y), 3, out.pixel(img.width() - 1 - x, y));
            }
        }
        return out;
    }

    RasterImage rotate90_clockwise(const RasterImage& img)
    {
        const uint32_t w = img.width();
        const uint32_t h = img.height();
        RasterImage    out(h, w);
        for (uint32_t y = 0; y < h; ++y)
        {
            for (uint32_t x = 0; x < w; ++x)
            {
                copy_n(img.pixel(x, y), 3, out.pixel(h - 1 - y, x));
            }
        }
        return out;
    }

    RasterImage rotate90_counterclockwise(const RasterImage& img)
    {
        const uint32_t w = img.width();
        const uint32_t h = img.height();
        RasterImage    out(h, w);
        for (uint32_t y = 0; y < h; ++y)
        {
            for (uint32_t x = 0; x < w; ++x)
            {
                copy_n(img.pixel(x, y), 3, out.pixel(y, w - 1 - x));
            }
        }
        return out;
    }

    double exposure_gain(int severity) { return 0.1 * severity + 0.1; }

    RasterImage adjust_lightness_hsl(const RasterImage& img, int severity, Exposure direction)
    {
        if (severity < 1 || severity > 5)
        {
            throw Error(Errc::invalid_argument, "adjust_lightness_hsl: severity must be in 1..5");
        }
        const double gain = (direction == Exposure::Brighten ? 1.0 : -1.0) * exposure_gain(severity);
        RasterImage  out  = img;
        auto&        d    = out.data();
        for (size_t i = 0; i < d.size(); i += 3)
        {
            Hsl hsl = rgb_to_hsl({d[i], d[i + 1], d[i + 2]});
            hsl.l   = clamp(hsl.l + gain, 0.0, 1.0);
            const Rgb px = hsl_to_rgb(hsl);
            d[i]         = px.r;
            d[i + 1]     = px.g;
            d[i + 2]     = px.b;
        }
        return out;
    }

    vector<pair<int, int>> motion_blur_taps(int k, double angle_deg)
    {
        if (k < 3 || k % 2 == 0)
        {
            throw Error(Errc::invalid_argument, "motion blur kernel must be odd and >= 3");
        }
        const double rad = angle_deg * numbers::pi / 180.0;
        const double c   = cos(rad);
        const double s   = -sin(rad); // image y grows downward
        const int    r   = k / 2;
        vector<pair<int, int>> taps;
        taps.reserve(k);
        // Step along the dominant axis so every tap is distinct and inside the k x k support.
        if (fabs(c) >= fabs(s))
        {
            for (int i = -r; i <= r; ++i)
            {
                taps.emplace_back(i, static_cast<int>(lround(i * s / c)));
            }
        }
        else
        {
            for (int i = -r; i <= r; ++i)
            {
                taps.emplace_back(static_cast<int>(lround(i * c / s)), i);
            }
        }
        return taps;
    }

    RasterImage convolve_motion_blur(const RasterImage& img, int k, double angle_deg)
    {
        const auto     taps = motion_blur_taps(k, angle_deg);
        const int      w    = static_cast<int>(img.width());
        const int      h    = static_cast<int>(img.height());
        const unsigned n    = static_cast<unsigned>(taps.size());
        RasterImage    out(img.width(), img.height());
        for (int y = 0; y < h; ++y)
        {
            for (int x = 0; x < w; ++x)
            {
                unsigned sum[3] = {0, 0, 0};
                for (const auto& [dx, dy] : taps)
                {
                    const int      sx = clamp(x + dx, 0, w - 1);
                    const int      sy = clamp(y + dy, 0, h - 1);
                    const uint8_t* p  = img.pixel(sx, sy);
                    sum[0] += p[0];
                    sum[1] += p[1];
                    sum[2] += p[2];
                }
                uint8_t* o = out.pixel(x, y);
                for (int ch = 0; ch < 3; ++ch)
                {
                    o[ch] = static_cast<uint8_t>((sum[ch] + n / 2) / n);
                }
            }
        }
        return out;
    }

    RasterImage poisson_blend(const RasterImage& dst, const Patch& patch, const PoissonOptions& opt)
    {
        const int pw = static_cast<int>(patch.pixels.width());
        const int ph = static_cast<int>(patch.pixels.height());
        const int W  = static_cast<int>(dst.width());
        const int H  = static_cast<int>(dst.height());
        if (patch.origin_x < 0 || patch.origin_y < 0 || patch.origin_x + pw > W || patch.origin_y + ph > H)
        {
            throw Error(Errc::patch_out_of_bounds, "poisson_blend: patch does not fit inside destination");
        }
        if (patch.alpha.size() != static_cast<size_t>(pw) * ph)
        {
            throw Error(Errc::invalid_argument, "poisson_blend: alpha size must match patch dimensions");
        }

        // Unknowns are the interior patch pixels with alpha > 0, indexed
        // row-major. The outer ring only supplies guidance gradients.
        vector<int> index(static_cast<size_t>(pw) * ph, -1);
        vector<pair<int, int>> cells;
        for (int y = 1; y + 1 < ph; ++y)
        {
            for (int x = 1; x + 1 < pw; ++x)
            {
                if (patch.alpha[static_cast<size_t>(y) * pw + x] > 0.0f)
                {
                    index[static_cast<size_t>(y) * pw + x] = static_cast<int>(cells.size());
                    cells.emplace_back(x, y);
                }
            }
        }
        RasterImage out = dst;
        if (cells.empty())
        {
            return out;
        }

        struct Row
        {
            array<int, 4> inner;     // neighbouring unknowns, -1 if absent
            int           count = 0; // neighbours inside the image
            array<double, 3> rhs{};  // Dirichlet values + guidance divergence
        };
        vector<Row> rows(cells.size());
        array<double, 3> offset_sum{};
        size_t           boundary_contacts = 0;
        constexpr array<pair<int, int>, 4> dirs = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

        for (size_t u = 0; u < cells.size(); ++u)
        {
            const auto [x, y] = cells[u];
            Row&           row = rows[u];
            row.inner.fill(-1);
            const uint8_t* gp  = patch.pixels.pixel(x, y);
            for (size_t d = 0; d < dirs.size(); ++d)
            {
                const int qx = x + dirs[d].first;
                const int qy = y + dirs[d].second;
                const int ax = patch.origin_x + qx;
                const int ay = patch.origin_y + qy;
                if (ax < 0 || ay < 0 || ax >= W || ay >= H)
                {
                    continue;
                }
                ++row.count;
                const uint8_t* gq = patch.pixels.pixel(qx, qy);
                for (int ch = 0; ch < 3; ++ch)
                {
                    row.rhs[ch] += double(gp[ch]) - double(gq[ch]);
                }
                const int q = index[static_cast<size_t>(qy) * pw + qx];
                if (q >= 0)
                {
                    row.inner[d] = q;
                }
                else
                {
                    const uint8_t* b = dst.pixel(ax, ay);
                    for (int ch = 0; ch < 3; ++ch)
                    {
                        row.rhs[ch] += b[ch];
                        offset_sum[ch] += double(b[ch]) - double(gp[ch]);
                    }
                    ++boundary_contacts;
                }
            }
        }

        // Start from the patch shifted by the mean boundary mismatch.
        for (int ch = 0; ch < 3; ++ch)
        {
            const double shift = boundary_contacts ? offset_sum[ch] / boundary_contacts : 0.0;
            vector<double> f(cells.size());
            for (size_t u = 0; u < cells.size(); ++u)
            {
                f[u] = patch.pixels.pixel(cells[u].first, cells[u].second)[ch] + shift;
            }
            for (int it = 0; it < opt.max_iterations; ++it)
            {
                double max_delta = 0;
                for (size_t u = 0; u < cells.size(); ++u)
                {
                    const Row& row = rows[u];
                    if (row.count == 0)
                    {
                        continue;
                    }
                    double acc = row.rhs[ch];
                    for (int q : row.inner)
                    {
                        if (q >= 0)
                        {
                            acc += f[q];
                        }
                    }
                    const double next = acc / row.count;
                    max_delta         = max(max_delta, fabs(next - f[u]));
                    f[u]              = next;
                }
                if (max_delta < opt.tolerance)
                {
                    break;
                }
            }
            for (size_t u = 0; u < cells.size(); ++u)
            {
                const auto [x, y] = cells[u];
                const double a    = patch.alpha[static_cast<size_t>(y) * pw + x];
                uint8_t*     o    = out.pixel(patch.origin_x + x, patch.origin_y + y);
                const double base = o[ch];
                o[ch]             = to_u8(a * f[u] + (1.0 - a) * base);
            }
        }
        return out;
    }

    RasterImage inpaint(const RasterImage& img, const Mask& region, const InpaintOptions& opt)
    {
        const int W = static_cast<int>(img.width());
        const int H = static_cast<int>(img.height());
        if (region.width != img.width() || region.height != img.height())
        {
            throw Error(Errc::invalid_argument, "inpaint: mask dimensions must match image");
        }
        const size_t n       = static_cast<size_t>(W) * H;
        size_t       unknown = 0;
        for (uint8_t m : region.data)
        {
            unknown += m != 0;
        }
        if (unknown == 0)
        {
            return img;
        }
        if (unknown == n)
        {
            throw Error(Errc::mask_covers_image, "inpaint: mask leaves no known pixels");
        }

        vector<float>   val(n * 3);
        vector<uint8_t> known(n);
        for (size_t i = 0; i < n; ++i)
        {
            known[i] = region.data[i] == 0;
            for (int ch = 0; ch < 3; ++ch)
            {
                val[i * 3 + ch] = img.data()[i * 3 + ch];
            }
        }

        // Inward march, one ring at a time. Each ring reads only pixels known
        // before it started, so the fill does not depend on scan order.
        vector<uint8_t> queued(n, 0);
        vector<size_t>  ring;
        auto push_unknown_neighbours = [&](int x, int y, vector<size_t>& into) {
            for (int dy = -1; dy <= 1; ++dy)
            {
                for (int dx = -1; dx <= 1; ++dx)
                {
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if ((dx || dy) && nx >= 0 && ny >= 0 && nx < W && ny < H)
                    {
                        const size_t j = static_cast<size_t>(ny) * W + nx;
                        if (!known[j] && !queued[j])
                        {
                            queued[j] = 1;
                            into.push_back(j);
                        }
                    }
                }
            }
        };
        for (int y = 0; y < H; ++y)
        {
            for (int x = 0; x < W; ++x)
            {
                const size_t i = static_cast<size_t>(y) * W + x;
                if (!known[i])
                {
                    continue;
                }
                bool edge = false;
                for (int dy = -1; dy <= 1 && !edge; ++dy)
                {
                    for (int dx = -1; dx <= 1 && !edge; ++dx)
                    {
                        const int nx = x + dx;
                        const int ny = y + dy;
                        edge = nx >= 0 && ny >= 0 && nx < W && ny < H && !known[static_cast<size_t>(ny) * W + nx];
                    }
                }
                if (edge)
                {
                    push_unknown_neighbours(x, y, ring);
                }
            }
        }
        sort(ring.begin(), ring.end());
        vector<float> fresh;
        while (!ring.empty())
        {
            fresh.assign(ring.size() * 3, 0.0f);
            for (size_t r = 0; r < ring.size(); ++r)
            {
                const int x     = static_cast<int>(ring[r] % W);
                const int y     = static_cast<int>(ring[r] / W);
                double    sum[3] = {0, 0, 0};
                int       cnt    = 0;
                for (int dy = -1; dy <= 1; ++dy)
                {
                    for (int dx = -1; dx <= 1; ++dx)
                    {
                        const int nx = x + dx;
                        const int ny = y + dy;
                        if ((dx || dy) && nx >= 0 && ny >= 0 && nx < W && ny < H)
                        {
                            const size_t j = static_cast<size_t>(ny) * W + nx;
                            if (known[j])
                            {
                                for (int ch = 0; ch < 3; ++ch)
                                {
                                    sum[ch] += val[j * 3 + ch];
                                }
                                ++cnt;
                            }
                        }
                    }
                }
                for (int ch = 0; ch < 3; ++ch)
                {
                    fresh[r * 3 + ch] = static_cast<float>(sum[ch] / cnt);
                }
            }
            vector<size_t> next;
            for (size_t r = 0; r < ring.size(); ++r)
            {
                for (int ch = 0; ch < 3; ++ch)
                {
                    val[ring[r] * 3 + ch] = fresh[r * 3 + ch];
                }
                known[ring[r]] = 1;
            }
            for (size_t i : ring)
            {
                push_unknown_neighbours(static_cast<int>(i % W), static_cast<int>(i / W), next);
            }
            sort(next.begin(), next.end());
            ring = std::move(next);
        }

        // Diffusion: Gauss-Seidel relaxation of the masked pixels.
        vector<size_t> cells;
        cells.reserve(unknown);
        for (size_t i = 0; i < n; ++i)
        {
            if (region.data[i])
            {
                cells.push_back(i);
            }
        }
        for (int it = 0; it < opt.smoothing_iterations; ++it)
        {
            double max_delta = 0;
            for (size_t i : cells)
            {
                const int x = static_cast<int>(i % W);
                const int y = static_cast<int>(i / W);
                double    sum[3] = {0, 0, 0};
                int       cnt    = 0;
                auto add = [&](int nx, int ny) {
                    if (nx >= 0 && ny >= 0 && nx < W && ny < H)
                    {
                        const size_t j = static_cast<size_t>(ny) * W + nx;
                        for (int ch = 0; ch < 3; ++ch)
                        {
                            sum[ch] += val[j * 3 + ch];
                        }
                        ++cnt;
                    }
                };
                add(x - 1, y);
                add(x + 1, y);
                add(x, y - 1);
                add(x, y + 1);
                for (int ch = 0; ch < 3; ++ch)
                {
                    const float next = static_cast<float>(sum[ch] / cnt);
                    max_delta        = max(max_delta, double(fabs(next - val[i * 3 + ch])));
                    val[i * 3 + ch]  = next;
                }
            }
            if (max_delta < opt.tolerance)
            {
                break;
            }
        }

        RasterImage out = img;
        for (size_t i : cells)
        {
            for (int ch = 0; ch < 3; ++ch)
            {
                out.data()[i * 3 + ch] = to_u8(val[i * 3 + ch]);
            }
        }
        return out;
    }

    RasterImage render_rain(const RasterImage& img, Interval drop_size, Interval speed, uint64_t seed)
    {
        Rng          rng(seed);
        const double W     = img.width();
        const double H     = img.height();
        const double spd   = rng.uniform(speed.lo, speed.hi);
        const double drop  = rng.uniform(drop_size.lo, drop_size.hi);
        const auto   count = static_cast<size_t>(lround(spd * W * H / 300.0));
        if (count == 0)
        {
            return img;
        }
        const double length = max(1.0, spd * H * 0.12);
        const double radius = max(0.3, drop * 6.0);
        const double wind   = rng.uniform(-15.0, 15.0) * numbers::pi / 180.0;
        AlphaLayer   layer(img.width(), img.height());
        for (size_t i = 0; i < count; ++i)
        {
            const double x     = rng.uniform(-0.1 * W, 1.1 * W);
            const double y     = rng.uniform(-length, H);
            const double l     = length * rng.uniform(0.6, 1.0);
            const double a     = wind + rng.uniform(-0.03, 0.03);
            const float  peak  = static_cast<float>(rng.uniform(0.35, 0.6));
            layer.segment(x, y, x + l * sin(a), y + l * cos(a), radius, peak);
        }
        return layer.composite(img, {200, 200, 208});
    }

    RasterImage render_snow(const RasterImage& img, int severity, uint64_t seed)
    {
        if (severity < 1 || severity > 5)
        {
            throw Error(Errc::invalid_argument, "render_snow: severity must be in 1..5");
        }
        constexpr array<double, 5> density = {4, 7, 10, 14, 18}; // flakes per 10k pixels
        constexpr array<double, 5> radius  = {1.0, 1.3, 1.6, 2.0, 2.5};
        constexpr array<double, 5> whiten  = {0.04, 0.07, 0.10, 0.13, 0.16};
        const int    s     = severity - 1;
        Rng          rng(seed);
        const double W     = img.width();
        const double H     = img.height();
        const auto   count = static_cast<size_t>(lround(density[s] * W * H / 10000.0));
        const double drift = rng.uniform(-0.4, 0.4);
        AlphaLayer   layer(img.width(), img.height());
        for (size_t i = 0; i < count; ++i)
        {
            const double x    = rng.uniform(0, W);
            const double y    = rng.uniform(0, H);
            const double r    = radius[s] * rng.uniform(0.5, 1.5);
            const double fall = r * rng.uniform(0.0, 2.0);
            const float  peak = static_cast<float>(rng.uniform(0.6, 0.95));
            layer.segment(x, y, x + fall * drift, y + fall, r, peak);
        }
        RasterImage out = layer.composite(img, {250, 250, 252});
        for (auto& v : out.data())
        {
            v = to_u8(v + (255.0 - v) * whiten[s]);
        }
        return out;
    }

    RasterImage render_fog(const RasterImage& img, int severity, uint64_t seed)
    {
        if (severity < 1 || severity > 5)
        {
            throw Error(Errc::invalid_argument, "render_fog: severity must be in 1..5");
        }
        constexpr array<double, 5> base = {0.2, 0.35, 0.5, 0.6, 0.7};
        Rng         rng(seed);
        const auto  noise = value_noise(img.width(), img.height(), 3, 3, rng);
        const double b    = base[severity - 1];
        RasterImage out   = img;
        auto&       d     = out.data();
        for (size_t i = 0; i < noise.size(); ++i)
        {
            const double a = b * (0.5 + 0.5 * noise[i]);
            for (size_t ch = 0; ch < 3; ++ch)
            {
                const double v = d[i * 3 + ch];
                d[i * 3 + ch]  = to_u8(v + (255.0 - v) * a);
            }
        }
        return out;
    }

    RasterImage render_flare(const RasterImage& img, Point center, uint64_t seed)
    {
        Rng          rng(seed);
        const double W      = img.width();
        const double H      = img.height();
        const double radius = 0.35 * min(W, H) * rng.uniform(0.8, 1.2);
        const double sigma  = radius / 2.5;
        const double core   = radius / 10.0;

        struct Ghost
        {
            Point  c;
            double r;
            array<double, 3> tint;
            double strength;
        };
        const Point        mid{W / 2.0, H / 2.0};
        constexpr array<double, 4> along = {0.6, 1.2, 1.5, 1.9};
        constexpr array<double, 4> size  = {0.15, 0.30, 0.10, 0.22};
        constexpr array<array<double, 3>, 3> palette = {{{0.6, 0.8, 1.0}, {1.0, 0.7, 0.4}, {0.6, 1.0, 0.7}}};
        vector<Ghost> ghosts;
        for (size_t g = 0; g < along.size(); ++g)
        {
            const double t = along[g] + rng.uniform(-0.1, 0.1);
            Ghost        gh;
            gh.c        = {center.x + t * (mid.x - center.x), center.y + t * (mid.y - center.y)};
            gh.r        = radius * size[g] * rng.uniform(0.8, 1.2);
            gh.tint     = palette[static_cast<size_t>(rng.uniform_int(0, palette.size() - 1))];
            gh.strength = rng.uniform(0.08, 0.16);
            ghosts.push_back(gh);
        }
        const bool   upper = center.y < H / 2.0;
        constexpr array<double, 3> warm = {1.0, 0.95, 0.85};

        RasterImage out = img;
        for (uint32_t y = 0; y < img.height(); ++y)
        {
            const bool   lifted = (y + 0.5 < H / 2.0) == upper;
            const double gain   = lifted ? 1.0 + flare_brightness_lift : 1.0;
            for (uint32_t x = 0; x < img.width(); ++x)
            {
                const double dx   = x + 0.5 - center.x;
                const double dy   = y + 0.5 - center.y;
                const double d2   = dx * dx + dy * dy;
                const double glow = 0.55 * exp(-d2 / (2 * sigma * sigma)) + 0.45 * exp(-d2 / (2 * core * core));
                array<double, 3> add{};
                for (int ch = 0; ch < 3; ++ch)
                {
                    add[ch] = 255.0 * glow * warm[ch];
                }
                for (const Ghost& g : ghosts)
                {
                    const double gx = x + 0.5 - g.c.x;
                    const double gy = y + 0.5 - g.c.y;
                    const double r  = sqrt(gx * gx + gy * gy);
                    const double e  = clamp((g.r - r) / 2.0 + 0.5, 0.0, 1.0);
                    if (e > 0)
                    {
                        for (int ch = 0; ch < 3; ++ch)
                        {
                            add[ch] += 255.0 * g.strength * e * g.tint[ch];
                        }
                    }
                }
                uint8_t* p = out.pixel(x, y);
                for (int ch = 0; ch < 3; ++ch)
                {
                    p[ch] = to_u8(p[ch] * gain + add[ch]);
                }
            }
        }
        return out;
    }

    double mean_luminance(const RasterImage& img)
    {
        const auto& d   = img.data();
        double      sum = 0;
        for (size_t i = 0; i < d.size(); i += 3)
        {
            sum += 0.299 * d[i] + 0.587 * d[i + 1] + 0.114 * d[i + 2];
        }
        return sum / (d.size() / 3);
    }
}
