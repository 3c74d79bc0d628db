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

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lightaug/core_model.hpp"
#include "lightaug/imaging.hpp"
#include "lightaug/rng.hpp"

namespace lightaug
{
    enum class LightAction
    {
        Unchanged,
        Moved,
        Recolored,
        Rotated,
        Added,
        Scaled,
        Skipped,
    };

    std::string_view to_string(LightAction action);
    std::optional<LightAction> parse_light_action(std::string_view name);

    /// What a light transform did to one light. `source` indexes the input
    /// lights. For Moved and Added, `offset` is the signed horizontal shift
    /// in pixels. `clamped` marks a rotated box that was cut at the frame.
    struct LightNote
    {
        LightAction action  = LightAction::Unchanged;
        std::size_t source  = 0;
        double      offset  = 0;
        bool        clamped = false;
        std::string reason;

        friend bool operator==(const LightNote&, const LightNote&) = default;
    };

    /// True when the light produced by this note was altered by the transform.
    bool touched(const LightNote& note);

    /// For each output light of a transform, whether the transform altered it.
    /// Light i of the output corresponds to note i, except for AD where the
    /// appended lights follow the Added notes in order.
    std::vector<bool> touched_outputs(TransformKind kind, std::span<const LightNote> notes);

    /// Label-only view of a transform result, as stored next to augmented images.
    struct AugmentedLabels
    {
        ImageAnnotation        annotation;
        TransformKind          kind = TransformKind::RN;
        std::uint64_t          seed = 0;
        std::vector<LightNote> notes;

        friend bool operator==(const AugmentedLabels&, const AugmentedLabels&) = default;
    };

    struct TransformOutcome
    {
        LabeledImage           image;
        TransformKind          kind = TransformKind::RN;
        std::uint64_t          seed = 0;
        std::vector<LightNote> notes;
        /// Values drawn from the seed that shaped the pixels (blur angle,
        /// flare center, ...), recorded for the run manifest.
        std::vector<std::pair<std::string, double>> drawn;

        AugmentedLabels labels() const;

        friend bool operator==(const TransformOutcome&, const TransformOutcome&) = default;
    };

    namespace geometry
    {
        LightBox shift_x(const LightBox& b, double dx);

        /// Swaps the half-extents about the fixed center.
        LightBox rotate_box(const LightBox& b);

        /// Box after the canvas expansion and resample back to width x height.
        LightBox scale_box(const LightBox& b, double width, double height, const TransformParams& params);

        /// Image-wide affine map used by the canvas expansion.
        Point scale_point(Point p, double width, double height, const TransformParams& params);
    }

    LightState swap_color(LightState s);
    LightState dearrow(LightState s);

    /// Recomputes the output labels of a transform from the input labels
    /// and the recorded per-light actions alone.
    std::vector<LightBox> co_transform_labels(TransformKind kind,
                                              std::span<const LightBox> input,
                                              std::span<const LightNote> notes,
                                              std::uint32_t width,
                                              std::uint32_t height,
                                              const TransformParams& params);

    /// Runs one transformation. Light transforms throw Error(no_lights) on
    /// images without lights; callers skip those images.
    TransformOutcome apply(TransformKind kind, const LabeledImage& input, const TransformParams& params, std::uint64_t seed);

    TransformOutcome cc_change_color(const LabeledImage& input, std::uint64_t seed);
    TransformOutcome mp_move_position(const LabeledImage& input, std::uint64_t seed);
    TransformOutcome ad_add_lights(const LabeledImage& input, std::uint64_t seed);
    TransformOutcome rt_rotate(const LabeledImage& input, std::uint64_t seed);
    TransformOutcome sc_scale(const LabeledImage& input, const TransformParams& params);

    /// Rotates red bulb hues to green and green to red, gated on saturation
    /// and value so that the housing keeps its color.
    RasterImage remap_light_hue(const RasterImage& patch);

    namespace hue_gate
    {
        inline constexpr double min_saturation = 0.3;
        inline constexpr double min_value      = 0.25;
        bool is_red(const imaging::Hsv& hsv);
        bool is_green(const imaging::Hsv& hsv);
    }

    /// Independent Bernoulli(0.5) subset of n lights, rerolled until nonempty.
    std::vector<bool> choose_subset(std::size_t n, Rng& rng);
}
