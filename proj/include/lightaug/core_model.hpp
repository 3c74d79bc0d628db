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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lightaug
{
    /// Error categories raised across the toolkit. Every thrown lightaug::Error
    /// carries one of these so callers (and the CLI) can map it to an exit code.
    enum class Errc
    {
        invalid_argument,
        malformed_row,
        malformed_entry,
        unknown_tag,
        schema_error,
        io_error,
        too_small,
        patch_out_of_bounds,
        mask_covers_image,
        no_lights,
        no_ground_truth,
        unknown_image_id,
        mismatched_ids,
    };

    class Error : public std::runtime_error
    {
    public:
        Error(Errc code, const std::string& what)
            : std::runtime_error(what)
            , m_code(code)
        {
        }
        Errc code() const noexcept { return m_code; }

    private:
        Errc m_code;
    };

    const char* errc_name(Errc code);

    enum class LightState : std::uint8_t
    {
        Stop,
        Go,
        Warning,
        StopLeft,
        GoLeft,
    };

    inline constexpr std::array<LightState, 5> all_light_states = {
        LightState::Stop, LightState::Go, LightState::Warning, LightState::StopLeft, LightState::GoLeft};

    /// Canonical wire name: "stop", "go", "warning", "stop_left", "go_left".
    std::string_view to_string(LightState state);
    std::optional<LightState> parse_light_state(std::string_view name);

    /// Axis-aligned traffic light box in pixel coordinates plus its state.
    /// (x1, y1) is the top-left corner, (x2, y2) the bottom-right corner.
    struct LightBox
    {
        double     x1    = 0;
        double     y1    = 0;
        double     x2    = 0;
        double     y2    = 0;
        LightState state = LightState::Stop;

        double width() const { return x2 - x1; }
        double height() const { return y2 - y1; }
        double area() const { return width() * height(); }
        bool   valid() const { return x1 < x2 && y1 < y2; }

        friend bool operator==(const LightBox&, const LightBox&) = default;
    };

    struct Point
    {
        double x = 0;
        double y = 0;
        friend bool operator==(const Point&, const Point&) = default;
    };

    Point box_center(const LightBox& b);

    /// Intersects b with [0,w_img]x[0,h_img]. Returns nullopt when the
    /// intersection has zero width or height (the box left the image).
    std::optional<LightBox> clamp_box(const LightBox& b, double w_img, double h_img);

    /// True when b lies inside [0,w]x[0,h].
    bool box_inside(const LightBox& b, double w_img, double h_img);

    /// Owned row-major RGB8 raster.
    class RasterImage
    {
    public:
        static constexpr std::size_t channels = 3;

        RasterImage() = default;
        RasterImage(std::uint32_t width, std::uint32_t height, std::array<std::uint8_t, 3> fill = {0, 0, 0});
        RasterImage(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> data);

        std::uint32_t width() const { return m_width; }
        std::uint32_t height() const { return m_height; }
        bool          empty() const { return m_data.empty(); }

        const std::vector<std::uint8_t>& data() const { return m_data; }
        std::vector<std::uint8_t>&       data() { return m_data; }

        std::uint8_t* pixel(std::uint32_t x, std::uint32_t y)
        {
            return m_data.data() + (static_cast<std::size_t>(y) * m_width + x) * channels;
        }
        const std::uint8_t* pixel(std::uint32_t x, std::uint32_t y) const
        {
            return m_data.data() + (static_cast<std::size_t>(y) * m_width + x) * channels;
        }

        friend bool operator==(const RasterImage&, const RasterImage&) = default;

    private:
        std::uint32_t             m_width  = 0;
        std::uint32_t             m_height = 0;
        std::vector<std::uint8_t> m_data;
    };

    struct LabeledImage
    {
        std::string           id;
        RasterImage           pixels;
        std::vector<LightBox> lights;

        friend bool operator==(const LabeledImage&, const LabeledImage&) = default;
    };

    /// Labels of one image without its pixels: what annotation files carry.
    struct ImageAnnotation
    {
        std::string           id;
        std::uint32_t         width  = 0;
        std::uint32_t         height = 0;
        std::vector<LightBox> lights;

        friend bool operator==(const ImageAnnotation&, const ImageAnnotation&) = default;
    };

    ImageAnnotation annotation_of(const LabeledImage& img);

    struct ScoredBox
    {
        LightBox box;
        double   score = 0;

        friend bool operator==(const ScoredBox&, const ScoredBox&) = default;
    };

    /// One model's output on one image.
    struct DetectionSet
    {
        std::string            image_id;
        std::vector<ScoredBox> detections;

        friend bool operator==(const DetectionSet&, const DetectionSet&) = default;
    };

    enum class TransformFamily
    {
        Weather,
        Camera,
        Light,
    };

    enum class TransformKind
    {
        RN,
        SW,
        FG,
        LF,
        OE,
        UE,
        MB,
        CC,
        MP,
        AD,
        RT,
        SC,
    };

    inline constexpr std::array<TransformKind, 12> all_transform_kinds = {
        TransformKind::RN, TransformKind::SW, TransformKind::FG, TransformKind::LF,
        TransformKind::OE, TransformKind::UE, TransformKind::MB, TransformKind::CC,
        TransformKind::MP, TransformKind::AD, TransformKind::RT, TransformKind::SC};

    TransformFamily family(TransformKind kind);
    std::string_view to_string(TransformKind kind);
    std::string_view to_string(TransformFamily fam);
    std::optional<TransformKind> parse_transform_kind(std::string_view name);

    struct Interval
    {
        double lo = 0;
        double hi = 0;
        friend bool operator==(const Interval&, const Interval&) = default;
    };

    /// How SC maps box coordinates. ImageAffine sends every box through the
    /// same canvas map as the pixels; FixedCenter keeps each box center in
    /// place and only shrinks its half-extents.
    enum class ScaleLabelMode
    {
        ImageAffine,
        FixedCenter,
    };

    struct TransformParams
    {
        Interval       rain_drop_size{0.1, 0.2};
        Interval       rain_speed{0.2, 0.3};
        int            snow_severity = 2;
        int            fog_severity  = 2;
        int            oe_severity   = 4;
        int            ue_severity   = 1;
        int            mb_kernel     = 15;
        double         sc_pad_w      = 320;
        double         sc_pad_h      = 180;
        ScaleLabelMode sc_label_mode = ScaleLabelMode::ImageAffine;

        /// Throws Error(invalid_argument) when an invariant is violated.
        void validate() const;

        friend bool operator==(const TransformParams&, const TransformParams&) = default;
    };
}
