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

#include <gtest/gtest.h>

#include "lightaug/metrics.hpp"
#include "lightaug/rng.hpp"
#include "reference_metrics.hpp"
#include "test_util.hpp"

using namespace lightaug;
using namespace lightaug::metrics;
using lightaug::testing::raster_iou;
using lightaug::testing::reference_ap101;
using lightaug::testing::reference_map;
using lightaug::testing::reference_match;
using lightaug::testing::ReferenceImage;

namespace
{
    LightBox box(double x1, double y1, double x2, double y2, LightState s = LightState::Stop) { return {x1, y1, x2, y2, s}; }
}

TEST(metrics, iou_examples)
{
    EXPECT_DOUBLE_EQ(iou(box(0, 0, 2, 2), box(0, 0, 2, 2)), 1.0);
    EXPECT_DOUBLE_EQ(iou(box(0, 0, 2, 2), box(3, 3, 4, 4)), 0.0);
    EXPECT_DOUBLE_EQ(iou(box(0, 0, 2, 2), box(1, 1, 3, 3)), 1.0 / 7.0);
    EXPECT_NEAR(raster_iou(box(0, 0, 2, 2), box(1, 1, 3, 3), 64), 1.0 / 7.0, 1e-9);
    EXPECT_DOUBLE_EQ(iou(box(0, 0, 2, 2, LightState::Go), box(0, 0, 2, 2, LightState::Stop)), 1.0);
}

TEST(metrics, iou_properties)
{
    Rng rng(2);
    for (int t = 0; t < 300; ++t)
    {
        const double ax = rng.uniform_int(0, 8), ay = rng.uniform_int(0, 8);
        const double bx = rng.uniform_int(0, 8), by = rng.uniform_int(0, 8);
        const LightBox a = box(ax, ay, ax + rng.uniform_int(1, 6), ay + rng.uniform_int(1, 6));
        const LightBox b = box(bx, by, bx + rng.uniform_int(1, 6), by + rng.uniform_int(1, 6));
        const double   o = iou(a, b);
        EXPECT_DOUBLE_EQ(o, iou(b, a));
        EXPECT_GE(o, 0.0);
        EXPECT_LE(o, 1.0);
        EXPECT_NEAR(o, raster_iou(a, b, 8), 1e-12);
        const double s = rng.uniform(0.1, 10);
        EXPECT_NEAR(iou(box(a.x1 * s, a.y1 * s, a.x2 * s, a.y2 * s), box(b.x1 * s, b.y1 * s, b.x2 * s, b.y2 * s)), o, 1e-12);
    }
}

TEST(metrics, match_examples)
{
    const std::vector<LightBox> gt = {box(0, 0, 10, 10)};
    const std::vector<ScoredBox> half = {{box(0, 0, 10, 5), 0.9}};
    EXPECT_EQ(match_detections(gt, half, 0.50).tp_count(), 1u);
    EXPECT_EQ(match_detections(gt, half, 0.55).tp_count(), 0u);
    EXPECT_EQ(match_detections(gt, half, 0.55).unmatched_gt, (std::vector<std::size_t>{0}));

    const std::vector<ScoredBox> wrong = {{box(0, 0, 10, 10, LightState::Go), 0.9}};
    const auto m = match_detections(gt, wrong, 0.5);
    EXPECT_EQ(m.fp_count(), 1u);
    EXPECT_EQ(m.unmatched_gt.size(), 1u);

    for (double theta : EvalConfig::coco_thresholds())
    {
        EXPECT_EQ(match_detections(gt, std::vector<ScoredBox>{{gt[0], 0.9}}, theta).tp_count(), 1u);
    }
}

TEST(metrics, ap_examples)
{
    const std::vector<RankedDetection> perfect = {{0.9, true}, {0.8, true}};
    EXPECT_DOUBLE_EQ(average_precision(perfect, 2, ApProtocol::Coco101), 1.0);
    EXPECT_DOUBLE_EQ(average_precision({}, 3, ApProtocol::Coco101), 0.0);
    // FP then TP with one ground truth: precision 0.5 at every recall level.
    const std::vector<RankedDetection> fp_tp = {{0.9, false}, {0.8, true}};
    EXPECT_NEAR(average_precision(fp_tp, 1, ApProtocol::Coco101), 0.5, 1e-12);
    EXPECT_NEAR(average_precision(fp_tp, 1, ApProtocol::AllPoint), 0.5, 1e-12);
    EXPECT_ERRC(average_precision(fp_tp, 0, ApProtocol::Coco101), Errc::no_ground_truth);
    // Half recall at full precision: 51 of 101 samples for the interpolated form.
    const std::vector<RankedDetection> half = {{0.9, true}};
    EXPECT_NEAR(average_precision(half, 2, ApProtocol::Coco101), 51.0 / 101.0, 1e-12);
    EXPECT_NEAR(average_precision(half, 2, ApProtocol::AllPoint), 0.5, 1e-12);
}

TEST(metrics, map_fixtures)
{
    const std::vector<ImageAnnotation> gt = {{"a", 20, 20, {box(0, 0, 10, 10), box(12, 0, 16, 10, LightState::Go)}}};
    std::vector<DetectionSet>          perfect = {{"a", {{gt[0].lights[0], 1.0}, {gt[0].lights[1], 1.0}}}};
    EXPECT_DOUBLE_EQ(map_5095(gt, perfect).map, 1.0);
    EXPECT_DOUBLE_EQ(map_5095(gt, {}).map, 0.0);

    const std::vector<ImageAnnotation> one = {{"a", 20, 20, {box(0, 0, 10, 10)}}};
    const std::vector<DetectionSet>    sweep = {{"a", {{box(0, 0, 10, 5), 0.9}}}};
    const EvalResult r = map_5095(one, sweep);
    EXPECT_NEAR(r.map, 0.1, 1e-9);
    EXPECT_DOUBLE_EQ(r.per_class_ap.at(LightState::Stop)[0], 1.0);
    EXPECT_DOUBLE_EQ(r.per_class_ap.at(LightState::Stop)[1], 0.0);

    EXPECT_ERRC(map_5095(one, std::vector<DetectionSet>{{"zzz", {}}}), Errc::unknown_image_id);
}

TEST(metrics, classes_without_ground_truth_are_excluded)
{
    const std::vector<ImageAnnotation> gt  = {{"a", 20, 20, {box(0, 0, 10, 10)}}};
    const std::vector<DetectionSet>    det = {{"a", {{box(0, 0, 10, 10), 0.9}, {box(11, 11, 15, 15, LightState::Go), 0.95}}}};
    const EvalResult                   r   = map_5095(gt, det);
    EXPECT_DOUBLE_EQ(r.map, 1.0);
    EXPECT_EQ(r.per_class_ap.count(LightState::Go), 0u);
    EXPECT_EQ(r.fp, 1u);
}

TEST(metrics, json_shape)
{
    const std::vector<ImageAnnotation> one = {{"a", 20, 20, {box(0, 0, 10, 10)}}};
    const auto j = to_json(map_5095(one, {}));
    EXPECT_EQ(j.dump(), R"({"map":0.0,"per_class":{"stop":{"0.50":0.0,"0.55":0.0,"0.60":0.0,"0.65":0.0,"0.70":0.0,"0.75":0.0,"0.80":0.0,"0.85":0.0,"0.90":0.0,"0.95":0.0}},"errors":{"fp":0,"fn":1}})");
}

TEST(metrics, thresholds_are_exact_decimals)
{
    const auto t = EvalConfig::coco_thresholds();
    ASSERT_EQ(t.size(), 10u);
    EXPECT_EQ(t[0], 0.5);
    EXPECT_EQ(t[1], 0.55);
    EXPECT_EQ(t[9], 0.95);
    EvalConfig bad;
    bad.iou_thresholds = {0.6, 0.5};
    EXPECT_ERRC(bad.validate(), Errc::invalid_argument);
}

TEST(metrics, greedy_agrees_with_exhaustive_reference)
{
    Rng rng(2026);
    const LightState states[] = {LightState::Stop, LightState::Go};
    for (int inst = 0; inst < 60; ++inst)
    {
        std::vector<ReferenceImage>  ref;
        std::vector<ImageAnnotation> gt;
        std::vector<DetectionSet>    det;
        const int                    n_img = static_cast<int>(rng.uniform_int(1, 3));
        for (int i = 0; i < n_img; ++i)
        {
            ReferenceImage r;
            for (int g = 0, n = static_cast<int>(rng.uniform_int(0, 5)); g < n; ++g)
            {
                const double x = rng.uniform_int(0, 6), y = rng.uniform_int(0, 6);
                r.gt.push_back(box(x, y, x + rng.uniform_int(1, 4), y + rng.uniform_int(1, 4), states[rng.uniform_int(0, 1)]));
            }
            for (int d = 0, n = static_cast<int>(rng.uniform_int(0, 5)); d < n; ++d)
            {
                const double x = rng.uniform_int(0, 6), y = rng.uniform_int(0, 6);
                r.det.push_back({box(x, y, x + rng.uniform_int(1, 4), y + rng.uniform_int(1, 4), states[rng.uniform_int(0, 1)]),
                                 rng.uniform_int(1, 4) / 4.0});
            }
            for (double theta : EvalConfig::coco_thresholds())
            {
                const auto fast = match_detections(r.gt, r.det, theta);
                const auto slow = reference_match(r.gt, r.det, theta);
                for (const auto& v : fast.verdicts)
                {
                    ASSERT_EQ(v.tp, slow.gt_of[v.detection] >= 0);
                    if (v.tp)
                    {
                        ASSERT_EQ(static_cast<int>(*v.gt), slow.gt_of[v.detection]);
                    }
                }
                ASSERT_EQ(fast.unmatched_gt.size(), slow.unmatched_gt.size());
            }
            gt.push_back({"img" + std::to_string(i), 16, 16, r.gt});
            det.push_back({"img" + std::to_string(i), r.det});
            ref.push_back(std::move(r));
        }
        const EvalResult fast = map_5095(gt, det);
        EXPECT_NEAR(fast.map, reference_map(ref, EvalConfig::coco_thresholds()), 1e-9) << "instance " << inst;
    }
}

TEST(metrics, map_is_invariant_under_image_permutation)
{
    const std::vector<ImageAnnotation> gt  = {{"a", 20, 20, {box(0, 0, 10, 10)}}, {"b", 20, 20, {box(2, 2, 8, 8)}}};
    const std::vector<DetectionSet>    det = {{"a", {{box(0, 0, 10, 9), 0.7}}}, {"b", {{box(2, 2, 8, 7), 0.6}, {box(9, 9, 12, 12), 0.9}}}};
    const std::vector<ImageAnnotation> gt_r(gt.rbegin(), gt.rend());
    const std::vector<DetectionSet>    det_r(det.rbegin(), det.rend());
    EXPECT_NEAR(map_5095(gt, det).map, map_5095(gt_r, det_r).map, 1e-12);
}

TEST(metrics, removing_false_positive_never_lowers_ap)
{
    const std::vector<ImageAnnotation> gt = {{"a", 20, 20, {box(0, 0, 10, 10), box(12, 12, 18, 18)}}};
    std::vector<DetectionSet> det = {{"a", {{box(0, 0, 10, 10), 0.5}, {box(3, 13, 6, 19), 0.8}, {box(12, 12, 18, 18), 0.3}}}};
    const double with_fp = map_5095(gt, det).map;
    det[0].detections.erase(det[0].detections.begin() + 1);
    EXPECT_GE(map_5095(gt, det).map, with_fp);
}
