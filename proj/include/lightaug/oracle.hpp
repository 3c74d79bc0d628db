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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lightaug/core_model.hpp"
#include "lightaug/metrics.hpp"
#include "lightaug/transforms.hpp"

namespace lightaug::oracle
{
    enum class ViolationCategory
    {
        MissedLight,
        WrongState,
        PhantomLight,
        MissedTransformedLight,
        BrokenUnchangedLight,
        DriftedBox,
    };

    inline constexpr ViolationCategory all_violation_categories[] = {
        ViolationCategory::MissedLight,           ViolationCategory::WrongState,
        ViolationCategory::PhantomLight,          ViolationCategory::MissedTransformedLight,
        ViolationCategory::BrokenUnchangedLight,  ViolationCategory::DriftedBox};

    std::string_view to_string(ViolationCategory c);

    /// Per-light violations are judged at this IoU.
    inline constexpr double violation_iou = 0.5;

    struct MrViolation
    {
        std::string       image_id;
        ViolationCategory category = ViolationCategory::MissedLight;
        /// Unmatched expected lights (at most one) and offending detections.
        std::vector<LightBox>  expected;
        std::vector<ScoredBox> detections;
        /// IoU between the expected light and the paired detection, 0 if unpaired.
        double iou = 0;

        friend bool operator==(const MrViolation&, const MrViolation&) = default;
    };

    struct MrReport
    {
        TransformKind kind          = TransformKind::RN;
        std::size_t   images        = 0;
        double        map_original  = 0;
        double        map_augmented = 0;
        /// Relative drop; absent when map_original is zero.
        std::optional<double>    map_drop;
        std::vector<MrViolation> violations;
        /// Errors the model already makes on the original images at IoU 0.5.
        std::size_t original_fp = 0;
        std::size_t original_fn = 0;

        std::map<ViolationCategory, std::size_t> counts() const;
    };

    std::vector<LightBox> expected_labels(const TransformOutcome& outcome);
    std::vector<LightBox> expected_labels(const AugmentedLabels& labels);

    /// Classifies the FP/FN evidence of one augmented image. Every false
    /// positive and false negative at violation_iou lands in exactly one
    /// violation.
    std::vector<MrViolation> classify_image(TransformKind kind,
                                            const AugmentedLabels& labels,
                                            std::span<const ScoredBox> detections,
                                            double score_floor = 0.0);

    /// Compares detections on the original images with detections on their
    /// augmented counterparts. Original ground truth is restricted to the
    /// images that have an augmented counterpart. Throws
    /// Error(mismatched_ids) when ids or kinds do not line up.
    MrReport check_mr(TransformKind kind,
                      std::span<const ImageAnnotation> original_gt,
                      std::span<const AugmentedLabels> augmented,
                      std::span<const DetectionSet> det_original,
                      std::span<const DetectionSet> det_augmented,
                      const metrics::EvalConfig& cfg = {});

    MrReport check_mr(TransformKind kind,
                      std::span<const ImageAnnotation> original_gt,
                      std::span<const TransformOutcome> outcomes,
                      std::span<const DetectionSet> det_original,
                      std::span<const DetectionSet> det_augmented,
                      const metrics::EvalConfig& cfg = {});

    nlohmann::ordered_json to_json(const MrReport& report);
    std::string to_table(const MrReport& report);
}
