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

#include "lightaug/oracle.hpp"

#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

using namespace std;

namespace lightaug::oracle
{
    namespace
    {
        using metrics::iou;

        nlohmann::ordered_json box_json(const LightBox& b)
        {
            return {{"x1", b.x1}, {"y1", b.y1}, {"x2", b.x2}, {"y2", b.y2}, {"state", string(to_string(b.state))}};
        }

        // Index detection sets by id, concatenating repeats; unknown ids throw.
        unordered_map<string, vector<ScoredBox>> index_detections(span<const DetectionSet> det,
                                                                 const set<string>& known,
                                                                 const char* what)
        {
            unordered_map<string, vector<ScoredBox>> out;
            for (const auto& ds : det)
            {
                if (!known.contains(ds.image_id))
                {
                    throw Error(Errc::mismatched_ids,
                                string(what) + " detections name unknown image '" + ds.image_id + "'");
                }
                auto& v = out[ds.image_id];
                v.insert(v.end(), ds.detections.begin(), ds.detections.end());
            }
            return out;
        }
    }

    string_view to_string(ViolationCategory c)
    {
        switch (c)
        {
        case ViolationCategory::MissedLight: return "MissedLight";
        case ViolationCategory::WrongState: return "WrongState";
        case ViolationCategory::PhantomLight: return "PhantomLight";
        case ViolationCategory::MissedTransformedLight: return "MissedTransformedLight";
        case ViolationCategory::BrokenUnchangedLight: return "BrokenUnchangedLight";
        case ViolationCategory::DriftedBox: return "DriftedBox";
        }
        return "?";
    }

    map<ViolationCategory, size_t> MrReport::counts() const
    {
        map<ViolationCategory, size_t> c;
        for (const auto& v : violations)
        {
            ++c[v.category];
        }
        return c;
    }

    vector<LightBox> expected_labels(const TransformOutcome& outcome) { return outcome.image.lights; }

    vector<LightBox> expected_labels(const AugmentedLabels& labels) { return labels.annotation.lights; }

    vector<MrViolation> classify_image(TransformKind kind,
                                       const AugmentedLabels& labels,
                                       span<const ScoredBox> detections,
                                       double score_floor)
    {
        const vector<LightBox> gt = expected_labels(labels);
        vector<ScoredBox>      det;
        for (const auto& d : detections)
        {
            if (d.score >= score_floor)
            {
                det.push_back(d);
            }
        }
        const bool light = family(kind) == TransformFamily::Light;
        vector<bool> touched = touched_outputs(kind, labels.notes);
        if (light && touched.size() != gt.size())
        {
            throw Error(Errc::mismatched_ids,
                        "notes of image '" + labels.annotation.id + "' do not match its labels");
        }
        touched.resize(gt.size(), false);

        const auto m = metrics::match_detections(gt, det, violation_iou);
        vector<size_t> fps;
        for (const auto& v : m.verdicts)
        {
            if (!v.tp)
            {
                fps.push_back(v.detection);
            }
        }
        sort(fps.begin(), fps.end());
        vector<bool> used(det.size(), false);

        vector<MrViolation> out;
        auto make = [&](ViolationCategory c) {
            MrViolation v;
            v.image_id = labels.annotation.id;
            v.category = c;
            return v;
        };

        // Each missed light takes the unused false positive overlapping it most.
        for (size_t g : m.unmatched_gt)
        {
            double best  = 0;
            size_t pick  = det.size();
            for (size_t d : fps)
            {
                const double o = iou(gt[g], det[d].box);
                if (!used[d] && o > best)
                {
                    best = o;
                    pick = d;
                }
            }
            ViolationCategory c;
            if (light && !touched[g])
            {
                c = ViolationCategory::BrokenUnchangedLight;
            }
            else if (pick != det.size() && best >= violation_iou && det[pick].box.state != gt[g].state)
            {
                c = ViolationCategory::WrongState;
            }
            else if (light && pick != det.size() && best < violation_iou)
            {
                c = ViolationCategory::DriftedBox;
            }
            else
            {
                c = light ? ViolationCategory::MissedTransformedLight : ViolationCategory::MissedLight;
            }
            MrViolation v = make(c);
            v.expected.push_back(gt[g]);
            if (pick != det.size())
            {
                used[pick] = true;
                v.detections.push_back(det[pick]);
                v.iou = best;
            }
            out.push_back(std::move(v));
        }

        // Remaining false positives: blame the light they overlap, if any.
        for (size_t d : fps)
        {
            if (used[d])
            {
                continue;
            }
            double best = 0;
            size_t g    = gt.size();
            for (size_t k = 0; k < gt.size(); ++k)
            {
                const double o = iou(gt[k], det[d].box);
                if (o > best)
                {
                    best = o;
                    g    = k;
                }
            }
            ViolationCategory c = ViolationCategory::PhantomLight;
            if (light && g != gt.size())
            {
                if (!touched[g])
                {
                    c = ViolationCategory::BrokenUnchangedLight;
                }
                else if (best < violation_iou)
                {
                    c = ViolationCategory::DriftedBox;
                }
                else if (det[d].box.state != gt[g].state)
                {
                    c = ViolationCategory::WrongState;
                }
            }
            MrViolation v = make(c);
            v.detections.push_back(det[d]);
            v.iou = best;
            out.push_back(std::move(v));
        }
        return out;
    }

    MrReport check_mr(TransformKind kind,
                      span<const ImageAnnotation> original_gt,
                      span<const AugmentedLabels> augmented,
                      span<const DetectionSet> det_original,
                      span<const DetectionSet> det_augmented,
                      const metrics::EvalConfig& cfg)
    {
        cfg.validate();
        unordered_map<string, size_t> orig_index;
        set<string>                   orig_ids;
        for (size_t i = 0; i < original_gt.size(); ++i)
        {
            orig_index.emplace(original_gt[i].id, i);
            orig_ids.insert(original_gt[i].id);
        }

        set<string>             aug_ids;
        vector<ImageAnnotation> subset;
        vector<ImageAnnotation> expected;
        for (const auto& a : augmented)
        {
            if (a.kind != kind)
            {
                throw Error(Errc::mismatched_ids, "image '" + a.annotation.id + "' was augmented with "
                                                      + string(to_string(a.kind)) + ", not " + string(to_string(kind)));
            }
            auto it = orig_index.find(a.annotation.id);
            if (it == orig_index.end())
            {
                throw Error(Errc::mismatched_ids,
                            "augmented image '" + a.annotation.id + "' has no original");
            }
            if (!aug_ids.insert(a.annotation.id).second)
            {
                throw Error(Errc::mismatched_ids, "augmented image '" + a.annotation.id + "' repeats");
            }
            subset.push_back(original_gt[it->second]);
            ImageAnnotation e = a.annotation;
            e.lights          = expected_labels(a);
            expected.push_back(std::move(e));
        }

        const auto orig_det = index_detections(det_original, orig_ids, "original");
        const auto aug_det  = index_detections(det_augmented, aug_ids, "augmented");

        auto gather = [&](const unordered_map<string, vector<ScoredBox>>& by_id) {
            vector<DetectionSet> sets;
            for (const auto& a : augmented)
            {
                auto it = by_id.find(a.annotation.id);
                sets.push_back({a.annotation.id, it == by_id.end() ? vector<ScoredBox>{} : it->second});
            }
            return sets;
        };
        const vector<DetectionSet> orig_sets = gather(orig_det);
        const vector<DetectionSet> aug_sets  = gather(aug_det);

        MrReport r;
        r.kind   = kind;
        r.images = augmented.size();
        if (!augmented.empty())
        {
            r.map_original  = metrics::map_5095(subset, orig_sets, cfg).map;
            r.map_augmented = metrics::map_5095(expected, aug_sets, cfg).map;
        }
        if (r.map_original > 0)
        {
            r.map_drop = (r.map_original - r.map_augmented) / r.map_original;
        }

        for (size_t i = 0; i < augmented.size(); ++i)
        {
            auto v = classify_image(kind, augmented[i], aug_sets[i].detections, cfg.score_floor);
            r.violations.insert(r.violations.end(), make_move_iterator(v.begin()), make_move_iterator(v.end()));

            vector<ScoredBox> kept;
            for (const auto& d : orig_sets[i].detections)
            {
                if (d.score >= cfg.score_floor)
                {
                    kept.push_back(d);
                }
            }
            const auto m = metrics::match_detections(subset[i].lights, kept, violation_iou);
            r.original_fp += m.fp_count();
            r.original_fn += m.unmatched_gt.size();
        }
        return r;
    }

    MrReport check_mr(TransformKind kind,
                      span<const ImageAnnotation> original_gt,
                      span<const TransformOutcome> outcomes,
                      span<const DetectionSet> det_original,
                      span<const DetectionSet> det_augmented,
                      const metrics::EvalConfig& cfg)
    {
        vector<AugmentedLabels> labels;
        labels.reserve(outcomes.size());
        for (const auto& o : outcomes)
        {
            labels.push_back(o.labels());
        }
        return check_mr(kind, original_gt, labels, det_original, det_augmented, cfg);
    }

    nlohmann::ordered_json to_json(const MrReport& r)
    {
        nlohmann::ordered_json j;
        j["kind"]          = string(to_string(r.kind));
        j["images"]        = r.images;
        j["map_original"]  = r.map_original;
        j["map_augmented"] = r.map_augmented;
        j["map_drop"]      = r.map_drop ? nlohmann::ordered_json(*r.map_drop) : nlohmann::ordered_json(nullptr);
        j["original_errors"] = {{"fp", r.original_fp}, {"fn", r.original_fn}};
        nlohmann::ordered_json counts = nlohmann::ordered_json::object();
        const auto             c      = r.counts();
        for (ViolationCategory cat : all_violation_categories)
        {
            auto it                   = c.find(cat);
            counts[string(to_string(cat))] = it == c.end() ? 0 : it->second;
        }
        j["counts"]     = counts;
        j["violations"] = nlohmann::ordered_json::array();
        for (const auto& v : r.violations)
        {
            nlohmann::ordered_json jv;
            jv["image_id"] = v.image_id;
            jv["category"] = string(to_string(v.category));
            jv["iou"]      = v.iou;
            jv["expected"] = nlohmann::ordered_json::array();
            for (const auto& b : v.expected)
            {
                jv["expected"].push_back(box_json(b));
            }
            jv["detections"] = nlohmann::ordered_json::array();
            for (const auto& d : v.detections)
            {
                auto jd     = box_json(d.box);
                jd["score"] = d.score;
                jv["detections"].push_back(jd);
            }
            j["violations"].push_back(jv);
        }
        return j;
    }

    string to_table(const MrReport& r)
    {
        ostringstream os;
        char          buf[256];
        os << "transform       " << to_string(r.kind) << "\n";
        os << "images          " << r.images << "\n";
        snprintf(buf, sizeof buf, "map original    %.4f\nmap augmented   %.4f\n", r.map_original, r.map_augmented);
        os << buf;
        if (r.map_drop)
        {
            snprintf(buf, sizeof buf, "map drop        %.2f%%\n", 100.0 * *r.map_drop);
            os << buf;
        }
        else
        {
            os << "map drop        undefined (original mAP is 0)\n";
        }
        os << "original errors fp=" << r.original_fp << " fn=" << r.original_fn << "\n";
        os << "violations      " << r.violations.size() << "\n";
        const auto c = r.counts();
        for (const auto& [cat, n] : c)
        {
            snprintf(buf, sizeof buf, "  %-24s %zu\n", string(to_string(cat)).c_str(), n);
            os << buf;
        }
        if (!r.violations.empty())
        {
            os << "\n";
            snprintf(buf, sizeof buf, "%-32s %-24s %6s  %s\n", "image", "category", "iou", "boxes");
            os << buf;
            for (const auto& v : r.violations)
            {
                string boxes;
                for (const auto& b : v.expected)
                {
                    snprintf(buf, sizeof buf, "gt(%.1f,%.1f,%.1f,%.1f %s) ", b.x1, b.y1, b.x2, b.y2,
                             string(to_string(b.state)).c_str());
                    boxes += buf;
                }
                for (const auto& d : v.detections)
                {
                    snprintf(buf, sizeof buf, "det(%.1f,%.1f,%.1f,%.1f %s %.2f) ", d.box.x1, d.box.y1, d.box.x2,
                             d.box.y2, string(to_string(d.box.state)).c_str(), d.score);
                    boxes += buf;
                }
                snprintf(buf, sizeof buf, "%-32s %-24s %6.3f  ", v.image_id.c_str(), string(to_string(v.category)).c_str(),
                         v.iou);
                if (!boxes.empty())
                {
                    boxes.pop_back();
                }
                os << buf << boxes << "\n";
            }
        }
        return os.str();
    }
}
