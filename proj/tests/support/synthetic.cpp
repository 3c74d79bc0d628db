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

#include "synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "lightaug/rng.hpp"

using namespace std;

namespace lightaug::testing
{
    namespace
    {
        void fill_rect(RasterImage& img, int x0, int y0, int x1, int y1, array<uint8_t, 3> c)
        {
            x0 = max(x0, 0);
            y0 = max(y0, 0);
            x1 = min<int>(x1, static_cast<int>(img.width()));
            y1 = min<int>(y1, static_cast<int>(img.height()));
            for (int y = y0; y < y1; ++y)
            {
                for (int x = x0; x < x1; ++x)
                {
                    uint8_t* p = img.pixel(x, y);
                    p[0]       = c[0];
                    p[1]       = c[1];
                    p[2]       = c[2];
                }
            }
        }

        void fill_disc(RasterImage& img, double cx, double cy, double r, array<uint8_t, 3> c)
        {
            for (int y = static_cast<int>(floor(cy - r)); y <= static_cast<int>(ceil(cy + r)); ++y)
            {
                for (int x = static_cast<int>(floor(cx - r)); x <= static_cast<int>(ceil(cx + r)); ++x)
                {
                    if (x < 0 || y < 0 || x >= static_cast<int>(img.width()) || y >= static_cast<int>(img.height()))
                    {
                        continue;
                    }
                    const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
                    if (dx * dx + dy * dy <= r * r)
                    {
                        uint8_t* p = img.pixel(x, y);
                        p[0]       = c[0];
                        p[1]       = c[1];
                        p[2]       = c[2];
                    }
                }
            }
        }
    }

    RasterImage draw_scene(uint32_t width, uint32_t height, const vector<LightBox>& lights, uint64_t seed)
    {
        Rng         rng(seed);
        RasterImage img(width, height);
        const int   horizon = static_cast<int>(height * 0.6);
        const int   tint    = static_cast<int>(rng.uniform_int(0, 30));
        for (uint32_t y = 0; y < height; ++y)
        {
            for (uint32_t x = 0; x < width; ++x)
            {
                uint8_t* p = img.pixel(x, y);
                if (static_cast<int>(y) < horizon)
                {
                    const double t = static_cast<double>(y) / horizon;
                    p[0]           = static_cast<uint8_t>(110 + tint + 40 * t);
                    p[1]           = static_cast<uint8_t>(150 + 30 * t);
                    p[2]           = static_cast<uint8_t>(210 - 20 * t);
                }
                else
                {
                    const uint8_t g = static_cast<uint8_t>(70 + ((x / 16 + y / 16) % 2) * 8);
                    p[0] = p[1] = p[2] = g;
                }
            }
        }
        for (const LightBox& b : lights)
        {
            const int x0 = static_cast<int>(floor(b.x1)), y0 = static_cast<int>(floor(b.y1));
            const int x1 = static_cast<int>(ceil(b.x2)), y1 = static_cast<int>(ceil(b.y2));
            fill_rect(img, x0, y0, x1, y1, {25, 25, 28});
            const bool   horizontal = b.width() > b.height();
            const double r          = 0.35 * min(b.width(), b.height());
            array<uint8_t, 3> red{235, 25, 20}, yellow{240, 190, 20}, green{30, 225, 70}, off{55, 55, 55};
            array<array<uint8_t, 3>, 3> bulbs{off, off, off};
            switch (b.state)
            {
            case LightState::Stop:
            case LightState::StopLeft: bulbs[0] = red; break;
            case LightState::Warning: bulbs[1] = yellow; break;
            case LightState::Go:
            case LightState::GoLeft: bulbs[2] = green; break;
            }
            for (int k = 0; k < 3; ++k)
            {
                const double f  = (k + 0.5) / 3.0;
                const double cx = horizontal ? b.x1 + f * b.width() : (b.x1 + b.x2) / 2;
                const double cy = horizontal ? (b.y1 + b.y2) / 2 : b.y1 + f * b.height();
                fill_disc(img, cx, cy, r, bulbs[k]);
            }
        }
        return img;
    }

    Dataset make_mini_dataset(size_t n, uint32_t width, uint32_t height, uint64_t seed)
    {
        Rng     rng(seed);
        Dataset d;
        d.name = "mini";
        const LightState states[] = {LightState::Stop, LightState::Go, LightState::Warning, LightState::StopLeft,
                                     LightState::GoLeft};
        for (size_t i = 0; i < n; ++i)
        {
            LabeledImage img;
            char         id[32];
            snprintf(id, sizeof id, "scene_%03zu.png", i);
            img.id             = id;
            const int count    = static_cast<int>(rng.uniform_int(1, 4));
            // Lights sit in separate columns with room to move one width either way.
            const double column = static_cast<double>(width) / count;
            for (int k = 0; k < count; ++k)
            {
                const bool   horizontal = rng.bernoulli(0.25);
                const double w          = horizontal ? 24 : 10;
                const double h          = horizontal ? 10 : 24;
                const double x          = floor(k * column + column / 2 - w / 2 + rng.uniform(-3, 3));
                const double y          = floor(rng.uniform(8, height * 0.45));
                img.lights.push_back({x, y, x + w, y + h, states[rng.uniform_int(0, 4)]});
            }
            img.pixels = draw_scene(width, height, img.lights, seed ^ (i + 1));
            d.images.push_back(std::move(img));
        }
        return d;
    }

    vector<ScoredBox> as_detections(const vector<LightBox>& lights, double score)
    {
        vector<ScoredBox> out;
        for (const auto& b : lights)
        {
            out.push_back({b, score});
        }
        return out;
    }

    DetectionSet perfect_detection(const ImageAnnotation& img) { return {img.id, as_detections(img.lights)}; }

    DetectionSet degraded_detection(const AugmentedLabels& labels, uint64_t seed, vector<size_t>* dropped)
    {
        const auto&  lights  = labels.annotation.lights;
        const bool   light   = family(labels.kind) == TransformFamily::Light;
        vector<bool> touched = touched_outputs(labels.kind, labels.notes);
        Rng          rng(image_seed(seed, labels.annotation.id));
        DetectionSet out{labels.annotation.id, {}};
        for (size_t i = 0; i < lights.size(); ++i)
        {
            const bool drop = light ? (i < touched.size() && touched[i]) : rng.bernoulli(0.3);
            if (drop)
            {
                if (dropped)
                {
                    dropped->push_back(i);
                }
                continue;
            }
            out.detections.push_back({lights[i], 1.0});
        }
        return out;
    }
}
