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

namespace lightaug::metrics
{
    enum class ApProtocol
    {
        Coco101,  ///< 101-point interpolated precision
        AllPoint, ///< area under the monotone precision envelope
    };

    std::optional<ApProtocol> parse_protocol(std::string_view name);

    struct EvalConfig
    {
        std::vector<double> iou_thresholds = coco_thresholds();
        double              score_floor    = 0.0;
        ApProtocol          protocol       = ApProtocol::Coco101;

        /// 0.50, 0.55, ..., 0.95.
        static std::vector<double> coco_thresholds();
        void validate() const;
    };

    double iou(const LightBox& a, const LightBox& b);

    struct DetectionVerdict
    {
        std::size_t                detection = 0; ///< index into the input detections
        std::optional<std::size_t> gt;            ///< matched ground truth, if TP
        double                     iou = 0;
        bool                       tp  = false;
    };

    struct ImageMatches
    {
        /// One verdict per detection, in processing order (score descending,
        /// ties by input order).
        std::vector<DetectionVerdict> verdicts;
        std::vector<std::size_t>      unmatched_gt;

        std::size_t tp_count() const;
        std::size_t fp_count() const;
    };

    /// Greedy matching: each detection, best score first, takes the unmatched
    /// ground truth of the same state with the highest IoU when that IoU is
    /// at least theta. Ties in IoU go to the lower ground-truth index.
    ImageMatches match_detections(std::span<const LightBox> gt, std::span<const ScoredBox> det, double theta);

    struct RankedDetection
    {
        double score = 0;
        bool   tp    = false;
    };

    /// AP of one class at one threshold. `ranked` must already be in rank
    /// order. Throws Error(no_ground_truth) when num_gt is zero.
    double average_precision(std::span<const RankedDetection> ranked, std::size_t num_gt, ApProtocol protocol);

    struct ImageEval
    {
        std::string  image_id;
        ImageMatches matches;
    };

    struct EvalResult
    {
        double                                  map = 0;
        std::vector<double>                     thresholds;
        std::map<LightState, std::vector<double>> per_class_ap;
        /// Matching evidence at the first (loosest) threshold.
        std::vector<ImageEval> images;
        std::size_t            fp = 0;
        std::size_t            fn = 0;
        /// False when no class had ground truth, in which case map is 0.
        bool has_ground_truth = false;
    };

    /// mAP averaged over the configured IoU thresholds. Images without a
    /// detection set count as having no detections. Throws
    /// Error(unknown_image_id) for detections on images absent from gt.
    EvalResult map_5095(std::span<const ImageAnnotation> gt, std::span<const DetectionSet> det, const EvalConfig& cfg = {});

    nlohmann::ordered_json to_json(const EvalResult& result);

    /// "0.50"-style key for a threshold.
    std::string threshold_key(double theta);
}
