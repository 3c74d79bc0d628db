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

#include "lightaug/core_model.hpp"

#include <algorithm>
#include <cmath>

using namespace std;

namespace lightaug
{
    const char* errc_name(Errc code)
    {
        switch (code)
        {
        case Errc::invalid_argument: return "InvalidArgument";
        case Errc::malformed_row: return "MalformedRow";
        case Errc::malformed_entry: return "MalformedEntry";
        case Errc::unknown_tag: return "UnknownTag";
        case Errc::schema_error: return "SchemaError";
        case Errc::io_error: return "IoError";
        case Errc::too_small: return "TooSmall";
        case Errc::patch_out_of_bounds: return "PatchOutOfBounds";
        case Errc::mask_covers_image: return "MaskCoversImage";
        case Errc::no_lights: return "NoLights";
        case Errc::no_ground_truth: return "NoGroundTruth";
        case Errc::unknown_image_id: return "UnknownImageId";
        case Errc::mismatched_ids: return "MismatchedIds";
        }
        return "Unknown";
    }

    string_view to_string(LightState state)
    {
        switch (state)
        {
        case LightState::Stop: return "stop";
        case LightState::Go: return "go";
        case LightState::Warning: return "warning";
        case LightState::StopLeft: return "stop_left";
        case LightState::GoLeft: return "go_left";
        }
        return "?";
    }

    optional<LightState> parse_light_state(string_view name)
    {
        for (LightState s : all_light_states)
        {
            if (to_string(s) == name)
            {
                return s;
            }
        }
        return nullopt;
    }

    Point box_center(const LightBox& b) { return {(b.x1 + b.x2) / 2.0, (b.y1 + b.y2) / 2.0}; }

    optional<LightBox> clamp_box(const LightBox& b, double w_img, double h_img)
    {
        if (!(w_img >= 1 && h_img >= 1))
        {
            throw Error(Errc::invalid_argument, "clamp_box: image dimensions must be >= 1");
        }
        LightBox out = b;
        out.x1       = clamp(b.x1, 0.0, w_img);
        out.x2       = clamp(b.x2, 0.0, w_img);
        out.y1       = clamp(b.y1, 0.0, h_img);
        out.y2       = clamp(b.y2, 0.0, h_img);
        if (!out.valid())
        {
            return nullopt;
        }
        return out;
    }

    bool box_inside(const LightBox& b, double w_img, double h_img)
    {
        return b.x1 >= 0 && b.y1 >= 0 && b.x2 <= w_img && b.y2 <= h_img;
    }

    RasterImage::RasterImage(uint32_t width, uint32_t height, array<uint8_t, 3> fill)
        : m_width(width)
        , m_height(height)
    {
        if (width == 0 || height == 0)
        {
            throw Error(Errc::invalid_argument, "RasterImage: width and height must be >= 1");
        }
        m_data.resize(static_cast<size_t>(width) * height * channels);
        for (size_t i = 0; i < m_data.size(); i += channels)
        {
            m_data[i]     = fill[0];
            m_data[i + 1] = fill[1];
            m_data[i + 2] = fill[2];
        }
    }

    RasterImage::RasterImage(uint32_t width, uint32_t height, vector<uint8_t> data)
        : m_width(width)
        , m_height(height)
        , m_data(std::move(data))
    {
        if (width == 0 || height == 0)
        {
            throw Error(Errc::invalid_argument, "RasterImage: width and height must be >= 1");
        }
        if (m_data.size() != static_cast<size_t>(width) * height * channels)
        {
            throw Error(Errc::invalid_argument, "RasterImage: data length must equal width*height*3");
        }
    }

    ImageAnnotation annotation_of(const LabeledImage& img)
    {
        return {img.id, img.pixels.width(), img.pixels.height(), img.lights};
    }

    TransformFamily family(TransformKind kind)
    {
        switch (kind)
        {
        case TransformKind::RN:
        case TransformKind::SW:
        case TransformKind::FG:
        case TransformKind::LF: return TransformFamily::Weather;
        case TransformKind::OE:
        case TransformKind::UE:
        case TransformKind::MB: return TransformFamily::Camera;
        case TransformKind::CC:
        case TransformKind::MP:
        case TransformKind::AD:
        case TransformKind::RT:
        case TransformKind::SC: return TransformFamily::Light;
        }
        return TransformFamily::Light;
    }

    string_view to_string(TransformKind kind)
    {
        switch (kind)
        {
        case TransformKind::RN: return "RN";
        case TransformKind::SW: return "SW";
        case TransformKind::FG: return "FG";
        case TransformKind::LF: return "LF";
        case TransformKind::OE: return "OE";
        case TransformKind::UE: return "UE";
        case TransformKind::MB: return "MB";
        case TransformKind::CC: return "CC";
        case TransformKind::MP: return "MP";
        case TransformKind::AD: return "AD";
        case TransformKind::RT: return "RT";
        case TransformKind::SC: return "SC";
        }
        return "?";
    }

    string_view to_string(TransformFamily fam)
    {
        switch (fam)
        {
        case TransformFamily::Weather: return "weather";
        case TransformFamily::Camera: return "camera";
        case TransformFamily::Light: return "light";
        }
        return "?";
    }

    optional<TransformKind> parse_transform_kind(string_view name)
    {
        for (TransformKind k : all_transform_kinds)
        {
            if (to_string(k) == name)
            {
                return k;
            }
        }
        return nullopt;
    }

    void TransformParams::validate() const
    {
        auto fail = [](const string& msg) { throw Error(Errc::invalid_argument, "TransformParams: " + msg); };
        auto check_interval = [&](const Interval& iv, const char* name) {
            if (!(iv.lo <= iv.hi) || iv.lo < 0)
            {
                fail(string(name) + " must satisfy 0 <= lo <= hi");
            }
        };
        auto check_severity = [&](int s, const char* name) {
            if (s < 1 || s > 5)
            {
                fail(string(name) + " must be in 1..5");
            }
        };
        check_interval(rain_drop_size, "rain_drop_size");
        check_interval(rain_speed, "rain_speed");
        check_severity(snow_severity, "snow_severity");
        check_severity(fog_severity, "fog_severity");
        check_severity(oe_severity, "oe_severity");
        check_severity(ue_severity, "ue_severity");
        if (mb_kernel < 3 || mb_kernel % 2 == 0)
        {
            fail("mb_kernel must be odd and >= 3");
        }
        auto even_pixels = [](double v) { return v >= 0 && v <= 1e6 && std::fmod(v, 2.0) == 0.0; };
        if (!even_pixels(sc_pad_w) || !even_pixels(sc_pad_h))
        {
            fail("sc_pad_w and sc_pad_h must be non-negative even pixel counts");
        }
    }
}
