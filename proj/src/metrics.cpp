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

#include "lightaug/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <unordered_map>

using namespace std;

namespace lightaug::metrics
{
    optional<ApProtocol> parse_protocol(string_view name)
    {
        if (name == "coco101")
        {
            return ApProtocol::Coco101;
        }
        if (name == "allpoint")
        {
            return ApProtocol::AllPoint;
        }
        return nullopt;
    }

    vector<double> EvalConfig::coco_thresholds()
    {
        vector<double> t;
        for (int k = 0; k < 10; ++k)
        {
            t.push_back((50 + 5 * k) / 100.0);
        }
        return t;
    }

    void EvalConfig::validate() const
    {
        if (iou_thresholds.empty())
        {
            throw Error(Errc::invalid_argument, "EvalConfig: at least one IoU threshold is required");
        }
        for (size_t i = 0; i < iou_thresholds.size(); ++i)
        {
            const double t = iou_thresholds[i];
            if (!(t > 0 && t <= 1) || (i > 0 && !(t > iou_thresholds[i - 1])))
            {
                throw Error(Errc::invalid_argument, "EvalConfig: thresholds must be strictly increasing in (0,1]");
            }
        }
    }

    double iou(const LightBox& a, const LightBox& b)
    {
        const double iw = min(a.x2, b.x2) - max(a.x1, b.x1);
        const double ih = min(a.y2, b.y2) - max(a.y1, b.y1);
        if (iw <= 0 || ih <= 0)
        {
            return 0.0;
        }
        const double inter = iw * ih;
        return inter / (a.area() + b.area() - inter);
    }

    size_t ImageMatches::tp_count() const
    {
        return static_cast<size_t>(count_if(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.tp; }));
    }

    size_t ImageMatches::fp_count() const { return verdicts.size() - tp_count(); }

    ImageMatches match_detections(span<const LightBox> gt, span<const ScoredBox> det, double theta)
    {
        vector<size_t> order(det.size());
        iota(order.begin(), order.end(), size_t{0});
        stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return det[a].score > det[b].score; });

        vector<bool> taken(gt.size(), false);
        ImageMatches out;
        out.verdicts.reserve(det.size());
        for (size_t d : order)
        {
            DetectionVerdict v;
            v.detection = d;
            double best = -1;
            size_t best_gt = 0;
            for (size_t g = 0; g < gt.size(); ++g)
            {
                if (taken[g] || gt[g].state != det[d].box.state)
                {
                    continue;
                }
                const double o = iou(det[d].box, gt[g]);
                if (o > best)
                {
                    best    = o;
                    best_gt = g;
                }
            }
            if (best >= theta)
            {
                taken[best_gt] = true;
                v.gt           = best_gt;
                v.iou          = best;
                v.tp           = true;
            }
            else
            {
                v.iou = max(best, 0.0);
            }
            out.verdicts.push_back(v);
        }
        for (size_t g = 0; g < gt.size(); ++g)
        {
            if (!taken[g])
            {
                out.unmatched_gt.push_back(g);
            }
        }
        return out;
    }

    double average_precision(span<const RankedDetection> ranked, size_t num_gt, ApProtocol protocol)
    {
        if (num_gt == 0)
        {
            throw Error(Errc::no_ground_truth, "average_precision: class has no ground truth");
        }
        vector<double> precision;
        vector<double> recall;
        size_t         tp = 0;
        for (size_t k = 0; k < ranked.size(); ++k)
        {
            tp += ranked[k].tp ? 1 : 0;
            precision.push_back(static_cast<double>(tp) / static_cast<double>(k + 1));
            recall.push_back(static_cast<double>(tp) / static_cast<double>(num_gt));
        }
        // Precision envelope: best precision at this recall or beyond.
        for (size_t k = precision.size(); k-- > 1;)
        {
            precision[k - 1] = max(precision[k - 1], precision[k]);
        }

        if (protocol == ApProtocol::Coco101)
        {
            double sum = 0;
            size_t k   = 0;
            for (int i = 0; i <= 100; ++i)
            {
                const double r = i / 100.0;
                while (k < recall.size() && recall[k] < r)
                {
                    ++k;
                }
                if (k < recall.size())
                {
                    sum += precision[k];
                }
            }
            return sum / 101.0;
        }

        double area      = 0;
        double last_rec  = 0;
        for (size_t k = 0; k < recall.size(); ++k)
        {
            if (recall[k] > last_rec)
            {
                area += (recall[k] - last_rec) * precision[k];
                last_rec = recall[k];
            }
        }
        return area;
    }

    EvalResult map_5095(span<const ImageAnnotation> gt, span<const DetectionSet> det, const EvalConfig& cfg)
    {
        cfg.validate();
        unordered_map<string, size_t> index;
        for (size_t i = 0; i < gt.size(); ++i)
        {
            index.emplace(gt[i].id, i);
        }
        vector<vector<ScoredBox>> dets(gt.size());
        for (const DetectionSet& ds : det)
        {
            auto it = index.find(ds.image_id);
            if (it == index.end())
            {
                throw Error(Errc::unknown_image_id, "detections reference unknown image id '" + ds.image_id + "'");
            }
            for (const ScoredBox& sb : ds.detections)
            {
                if (sb.score >= cfg.score_floor)
                {
                    dets[it->second].push_back(sb);
                }
            }
        }

        map<LightState, size_t> gt_count;
        for (const auto& img : gt)
        {
            for (const auto& l : img.lights)
            {
                ++gt_count[l.state];
            }
        }

        EvalResult result;
        result.thresholds       = cfg.iou_thresholds;
        result.has_ground_truth = !gt_count.empty();
        for (const auto& [state, n] : gt_count)
        {
            result.per_class_ap[state].assign(cfg.iou_thresholds.size(), 0.0);
        }

        double map_sum = 0;
        for (size_t t = 0; t < cfg.iou_thresholds.size(); ++t)
        {
            const double theta = cfg.iou_thresholds[t];
            // Detections of every class in rank order; images in gt order and
            // detections in input order break score ties.
            map<LightState, vector<pair<double, bool>>> by_class;
            for (size_t i = 0; i < gt.size(); ++i)
            {
                ImageMatches m = match_detections(gt[i].lights, dets[i], theta);
                vector<bool> tp(dets[i].size(), false);
                for (const auto& v : m.verdicts)
                {
                    tp[v.detection] = v.tp;
                }
                for (size_t d = 0; d < dets[i].size(); ++d)
                {
                    by_class[dets[i][d].box.state].emplace_back(dets[i][d].score, tp[d]);
                }
                if (t == 0)
                {
                    result.fp += m.fp_count();
                    result.fn += m.unmatched_gt.size();
                    result.images.push_back({gt[i].id, std::move(m)});
                }
            }
            double class_sum = 0;
            for (const auto& [state, n] : gt_count)
            {
                auto& list = by_class[state];
                stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
                vector<RankedDetection> ranked;
                ranked.reserve(list.size());
                for (const auto& [score, is_tp] : list)
                {
                    ranked.push_back({score, is_tp});
                }
                const double ap                = average_precision(ranked, n, cfg.protocol);
                result.per_class_ap[state][t] = ap;
                class_sum += ap;
            }
            if (!gt_count.empty())
            {
                map_sum += class_sum / static_cast<double>(gt_count.size());
            }
        }
        result.map = map_sum / static_cast<double>(cfg.iou_thresholds.size());
        return result;
    }

    string threshold_key(double theta)
    {
        char buf[16];
        snprintf(buf, sizeof buf, "%.2f", theta);
        return buf;
    }

    nlohmann::ordered_json to_json(const EvalResult& result)
    {
        nlohmann::ordered_json j;
        j["map"] = result.map;
        nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
        for (const auto& [state, aps] : result.per_class_ap)
        {
            nlohmann::ordered_json row = nlohmann::ordered_json::object();
            for (size_t t = 0; t < aps.size(); ++t)
            {
                row[threshold_key(result.thresholds[t])] = aps[t];
            }
            per_class[string(to_string(state))] = row;
        }
        j["per_class"] = per_class;
        j["errors"]    = {{"fp", result.fp}, {"fn", result.fn}};
        return j;
    }
}
