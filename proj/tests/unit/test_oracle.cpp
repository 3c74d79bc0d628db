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

#include "lightaug/oracle.hpp"
#include "lightaug/rng.hpp"
#include "synthetic.hpp"
#include "test_util.hpp"

using namespace lightaug;
using namespace lightaug::oracle;
using lightaug::testing::as_detections;
using lightaug::testing::make_mini_dataset;
using lightaug::testing::perfect_detection;

namespace
{
    struct Fixture
    {
        std::vector<ImageAnnotation>  original;
        std::vector<TransformOutcome> outcomes;
        std::vector<DetectionSet>     det_orig;
        std::vector<DetectionSet>     det_aug;
    };

    Fixture run(TransformKind kind, std::size_t n = 4, std::uint64_t seed = 5)
    {
        Fixture       f;
        const Dataset d = make_mini_dataset(n, 200, 150, seed);
        for (const auto& img : d.images)
        {
            f.original.push_back(annotation_of(img));
            f.det_orig.push_back(perfect_detection(f.original.back()));
            f.outcomes.push_back(apply(kind, img, {}, image_seed(seed, img.id)));
            f.det_aug.push_back(perfect_detection(annotation_of(f.outcomes.back().image)));
        }
        return f;
    }

    MrReport check(TransformKind kind, const Fixture& f)
    {
        return check_mr(kind, f.original, f.outcomes, f.det_orig, f.det_aug);
    }

    std::size_t evidence(const std::vector<MrViolation>& v)
    {
        std::size_t n = 0;
        for (const auto& x : v)
        {
            n += x.expected.size() + x.detections.size();
        }
        return n;
    }
}

TEST(oracle, expected_labels_examples)
{
    const Dataset d = make_mini_dataset(1, 200, 150, 3);
    const auto    fg = apply(TransformKind::FG, d.images[0], {}, 1);
    EXPECT_EQ(expected_labels(fg), d.images[0].lights);

    LabeledImage stop{"s.png", lightaug::testing::draw_scene(100, 100, {{20, 20, 30, 44, LightState::Stop}}, 1),
                      {{20, 20, 30, 44, LightState::Stop}}};
    EXPECT_EQ(expected_labels(apply(TransformKind::CC, stop, {}, 1)),
              (std::vector<LightBox>{{20, 20, 30, 44, LightState::Go}}));

    LabeledImage rt{"r.png", lightaug::testing::draw_scene(200, 120, {{100, 20, 120, 80, LightState::Stop}}, 1),
                    {{100, 20, 120, 80, LightState::Stop}}};
    EXPECT_EQ(expected_labels(apply(TransformKind::RT, rt, {}, 1)),
              (std::vector<LightBox>{{80, 40, 140, 60, LightState::Stop}}));
}

TEST(oracle, perfect_detector_is_clean_for_every_kind)
{
    for (TransformKind k : all_transform_kinds)
    {
        const MrReport r = check(k, run(k));
        EXPECT_TRUE(r.violations.empty()) << to_string(k);
        EXPECT_DOUBLE_EQ(r.map_original, 1.0);
        EXPECT_DOUBLE_EQ(r.map_augmented, 1.0);
        ASSERT_TRUE(r.map_drop);
        EXPECT_DOUBLE_EQ(*r.map_drop, 0.0);
        EXPECT_EQ(r.original_fp + r.original_fn, 0u);
    }
}

TEST(oracle, weather_missed_light)
{
    Fixture f = run(TransformKind::FG);
    f.det_aug[0].detections.erase(f.det_aug[0].detections.begin());
    const MrReport r = check(TransformKind::FG, f);
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_EQ(r.violations[0].category, ViolationCategory::MissedLight);
    EXPECT_EQ(r.violations[0].image_id, f.original[0].id);
    ASSERT_EQ(r.violations[0].expected.size(), 1u);
    EXPECT_EQ(r.violations[0].expected[0], f.original[0].lights[0]);
    EXPECT_GT(*r.map_drop, 0.0);
}

TEST(oracle, cc_old_state_is_wrong_state)
{
    Fixture f = run(TransformKind::CC);
    // Report the recolored first light with its pre-transform state.
    auto& first = f.det_aug[0].detections[0];
    first.box.state = f.original[0].lights[0].state;
    if (first.box.state == LightState::Warning)
    {
        GTEST_SKIP() << "first light is yellow";
    }
    const MrReport r = check(TransformKind::CC, f);
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_EQ(r.violations[0].category, ViolationCategory::WrongState);
    EXPECT_EQ(r.violations[0].detections.size(), 1u);
    EXPECT_EQ(r.violations[0].expected.size(), 1u);
    EXPECT_DOUBLE_EQ(r.violations[0].iou, 1.0);
}

TEST(oracle, light_kind_categories)
{
    // One image, two lights: the first moved by MP, the second left alone.
    const std::vector<LightBox> lights = {{20, 20, 30, 44, LightState::Stop}, {120, 20, 130, 44, LightState::Go}};
    AugmentedLabels             labels;
    labels.kind       = TransformKind::MP;
    labels.annotation = {"m.png", 200, 100, {{25, 20, 35, 44, LightState::Stop}, lights[1]}};
    labels.notes      = {{LightAction::Moved, 0, 5, false, {}}, {LightAction::Unchanged, 1, 0, false, {}}};

    auto classify = [&](std::vector<ScoredBox> det) { return classify_image(TransformKind::MP, labels, det); };

    auto v = classify({{lights[1], 1.0}});
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].category, ViolationCategory::MissedTransformedLight);

    v = classify({{labels.annotation.lights[0], 1.0}});
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].category, ViolationCategory::BrokenUnchangedLight);

    // Detection still at the old position overlaps the moved light by a third.
    v = classify({{lights[0], 1.0}, {lights[1], 1.0}});
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].category, ViolationCategory::DriftedBox);
    EXPECT_NEAR(v[0].iou, 1.0 / 3.0, 1e-12);

    v = classify({{labels.annotation.lights[0], 1.0}, {lights[1], 1.0}, {{170, 60, 180, 80, LightState::Go}, 0.4}});
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].category, ViolationCategory::PhantomLight);

    // Duplicate on the untouched light is blamed on that light.
    v = classify({{labels.annotation.lights[0], 1.0}, {lights[1], 1.0}, {{121, 20, 131, 44, LightState::Go}, 0.4}});
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].category, ViolationCategory::BrokenUnchangedLight);
}

TEST(oracle, violations_partition_errors)
{
    Rng rng(4);
    for (TransformKind k : all_transform_kinds)
    {
        Fixture f = run(k, 5, 11);
        for (auto& ds : f.det_aug)
        {
            std::vector<ScoredBox> noisy;
            for (auto d : ds.detections)
            {
                if (rng.bernoulli(0.2))
                {
                    continue;
                }
                if (rng.bernoulli(0.3))
                {
                    const double dx = rng.uniform(-8, 8);
                    d.box.x1 += dx;
                    d.box.x2 += dx;
                }
                if (rng.bernoulli(0.15))
                {
                    d.box.state = swap_color(d.box.state) == d.box.state ? LightState::Stop : swap_color(d.box.state);
                }
                d.score = rng.uniform(0.1, 1.0);
                noisy.push_back(d);
            }
            if (rng.bernoulli(0.5))
            {
                noisy.push_back({{5, 100, 15, 124, LightState::Go}, rng.uniform(0.1, 1.0)});
            }
            ds.detections = noisy;
        }
        const MrReport r = check(k, f);
        std::size_t errors = 0;
        for (std::size_t i = 0; i < f.outcomes.size(); ++i)
        {
            const auto m = metrics::match_detections(f.outcomes[i].image.lights, f.det_aug[i].detections, violation_iou);
            errors += m.fp_count() + m.unmatched_gt.size();
        }
        EXPECT_EQ(evidence(r.violations), errors) << to_string(k);
        for (const auto& v : r.violations)
        {
            EXPECT_LE(v.expected.size(), 1u);
            EXPECT_LE(v.detections.size(), 1u);
            EXPECT_FALSE(v.expected.empty() && v.detections.empty());
            if (family(k) != TransformFamily::Light)
            {
                EXPECT_NE(v.category, ViolationCategory::BrokenUnchangedLight);
                EXPECT_NE(v.category, ViolationCategory::MissedTransformedLight);
                EXPECT_NE(v.category, ViolationCategory::DriftedBox);
            }
            else
            {
                EXPECT_NE(v.category, ViolationCategory::MissedLight);
            }
        }
    }
}

TEST(oracle, original_errors_are_reported_separately)
{
    Fixture f = run(TransformKind::RN);
    f.det_orig[1].detections.clear();
    const MrReport r = check(TransformKind::RN, f);
    EXPECT_EQ(r.original_fn, f.original[1].lights.size());
    EXPECT_TRUE(r.violations.empty());
    EXPECT_LT(*r.map_drop, 0.0);
}

TEST(oracle, map_drop_undefined_without_original_score)
{
    Fixture f = run(TransformKind::SW);
    for (auto& ds : f.det_orig)
    {
        ds.detections.clear();
    }
    const MrReport r = check(TransformKind::SW, f);
    EXPECT_EQ(r.map_original, 0.0);
    EXPECT_FALSE(r.map_drop);
    EXPECT_TRUE(to_json(r)["map_drop"].is_null());
    EXPECT_NE(to_table(r).find("undefined"), std::string::npos);
}

TEST(oracle, mismatched_ids)
{
    Fixture f = run(TransformKind::FG, 2);
    auto    bad = f;
    bad.det_aug.push_back({"nope.png", {}});
    EXPECT_ERRC(check(TransformKind::FG, bad), Errc::mismatched_ids);
    bad = f;
    bad.det_orig.push_back({"nope.png", {}});
    EXPECT_ERRC(check(TransformKind::FG, bad), Errc::mismatched_ids);
    bad = f;
    bad.outcomes[0].image.id = "elsewhere.png";
    EXPECT_ERRC(check(TransformKind::FG, bad), Errc::mismatched_ids);
    EXPECT_ERRC(check(TransformKind::RN, f), Errc::mismatched_ids);
}

TEST(oracle, report_serialization)
{
    Fixture f = run(TransformKind::FG);
    f.det_aug[0].detections.erase(f.det_aug[0].detections.begin());
    const MrReport r = check(TransformKind::FG, f);
    const auto     j = to_json(r);
    EXPECT_EQ(j["kind"], "FG");
    EXPECT_EQ(j["counts"]["MissedLight"], 1);
    EXPECT_EQ(j["counts"]["PhantomLight"], 0);
    EXPECT_EQ(j["violations"][0]["image_id"], f.original[0].id);
    EXPECT_EQ(j["violations"][0]["expected"][0]["x1"], f.original[0].lights[0].x1);
    const std::string table = to_table(r);
    EXPECT_NE(table.find("MissedLight"), std::string::npos);
    EXPECT_NE(table.find(f.original[0].id), std::string::npos);
}
