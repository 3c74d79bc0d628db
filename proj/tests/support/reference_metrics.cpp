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

#include "reference_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

using namespace std;

namespace lightaug::testing
{
    namespace
    {
        double box_iou(const LightBox& a, const LightBox& b)
        {
            const double ix = max(0.0, min(a.x2, b.x2) - max(a.x1, b.x1));
            const double iy = max(0.0, min(a.y2, b.y2) - max(a.y1, b.y1));
            const double in = ix * iy;
            const double un = (a.x2 - a.x1) * (a.y2 - a.y1) + (b.x2 - b.x1) * (b.y2 - b.y1) - in;
            return un > 0 ? in / un : 0.0;
        }

        // Lexicographic comparison of rank keys; larger is better.
        bool better(const vector<pair<double, int>>& a, const vector<pair<double, int>>& b)
        {
            return lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
        }
    }

    ReferenceMatch reference_match(span<const LightBox> gt, span<const ScoredBox> det, double theta)
    {
        vector<size_t> order(det.size());
        iota(order.begin(), order.end(), size_t{0});
        stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return det[a].score > det[b].score; });

        vector<int>              assign(det.size(), -1);
        vector<int>              best_assign;
        vector<pair<double, int>> best_key;
        bool                     have = false;
        vector<bool>             used(gt.size(), false);

        // Depth-first over detections in rank order.
        auto recurse = [&](auto&& self, size_t k) -> void {
            if (k == order.size())
            {
                vector<pair<double, int>> key;
                for (size_t j : order)
                {
                    const int g = assign[j];
                    key.emplace_back(g < 0 ? -1.0 : box_iou(det[j].box, gt[g]), g < 0 ? INT32_MIN : -g);
                }
                if (!have || better(key, best_key))
                {
                    have        = true;
                    best_key    = key;
                    best_assign = assign;
                }
                return;
            }
            const size_t d = order[k];
            assign[d]      = -1;
            self(self, k + 1);
            for (size_t g = 0; g < gt.size(); ++g)
            {
                if (used[g] || gt[g].state != det[d].box.state || box_iou(det[d].box, gt[g]) < theta)
                {
                    continue;
                }
                used[g]   = true;
                assign[d] = static_cast<int>(g);
                self(self, k + 1);
                used[g]   = false;
                assign[d] = -1;
            }
        };
        recurse(recurse, 0);

        ReferenceMatch r;
        r.gt_of = best_assign;
        r.iou_of.resize(det.size(), 0);
        vector<bool> taken(gt.size(), false);
        for (size_t d = 0; d < det.size(); ++d)
        {
            if (r.gt_of[d] >= 0)
            {
                r.iou_of[d]          = box_iou(det[d].box, gt[r.gt_of[d]]);
                taken[r.gt_of[d]]    = true;
            }
        }
        for (size_t g = 0; g < gt.size(); ++g)
        {
            if (!taken[g])
            {
                r.unmatched_gt.push_back(static_cast<int>(g));
            }
        }
        return r;
    }

    double raster_iou(const LightBox& a, const LightBox& b, int n)
    {
        const double x0 = min(a.x1, b.x1), x1 = max(a.x2, b.x2);
        const double y0 = min(a.y1, b.y1), y1 = max(a.y2, b.y2);
        long inter = 0, uni = 0;
        const int nx = static_cast<int>(round((x1 - x0) * n)), ny = static_cast<int>(round((y1 - y0) * n));
        for (int j = 0; j < ny; ++j)
        {
            for (int i = 0; i < nx; ++i)
            {
                const double x = x0 + (i + 0.5) / n, y = y0 + (j + 0.5) / n;
                const bool in_a = x > a.x1 && x < a.x2 && y > a.y1 && y < a.y2;
                const bool in_b = x > b.x1 && x < b.x2 && y > b.y1 && y < b.y2;
                inter += (in_a && in_b) ? 1 : 0;
                uni += (in_a || in_b) ? 1 : 0;
            }
        }
        return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
    }

    double reference_ap101(const vector<pair<double, bool>>& ranked, size_t num_gt)
    {
        vector<double> prec, rec;
        size_t         tp = 0;
        for (size_t k = 0; k < ranked.size(); ++k)
        {
            tp += ranked[k].second;
            prec.push_back(static_cast<double>(tp) / (k + 1));
            rec.push_back(static_cast<double>(tp) / num_gt);
        }
        double sum = 0;
        for (int i = 0; i <= 100; ++i)
        {
            const double r    = i / 100.0;
            double       best = 0;
            for (size_t k = 0; k < prec.size(); ++k)
            {
                if (rec[k] >= r)
                {
                    best = max(best, prec[k]);
                }
            }
            sum += best;
        }
        return sum / 101.0;
    }

    double reference_map(const vector<ReferenceImage>& images, const vector<double>& thresholds)
    {
        map<LightState, size_t> gt_count;
        for (const auto& img : images)
        {
            for (const auto& b : img.gt)
            {
                ++gt_count[b.state];
            }
        }
        if (gt_count.empty())
        {
            return 0.0;
        }
        double total = 0;
        for (double theta : thresholds)
        {
            // (score, image, detection, tp) gathered then ranked.
            struct Row
            {
                double     score;
                size_t     image, det;
                bool       tp;
                LightState state;
            };
            vector<Row> rows;
            for (size_t i = 0; i < images.size(); ++i)
            {
                const auto m = reference_match(images[i].gt, images[i].det, theta);
                for (size_t d = 0; d < images[i].det.size(); ++d)
                {
                    rows.push_back({images[i].det[d].score, i, d, m.gt_of[d] >= 0, images[i].det[d].box.state});
                }
            }
            sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
                if (a.score != b.score)
                {
                    return a.score > b.score;
                }
                return a.image != b.image ? a.image < b.image : a.det < b.det;
            });
            double class_sum = 0;
            for (const auto& [state, n] : gt_count)
            {
                vector<pair<double, bool>> ranked;
                for (const auto& r : rows)
                {
                    if (r.state == state)
                    {
                        ranked.emplace_back(r.score, r.tp);
                    }
                }
                class_sum += reference_ap101(ranked, n);
            }
            total += class_sum / gt_count.size();
        }
        return total / thresholds.size();
    }
}
