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
#include <string>
#include <vector>

#include "lightaug/core_model.hpp"
#include "lightaug/dataset_io.hpp"
#include "lightaug/transforms.hpp"

namespace lightaug::testing
{
    /// Sky-and-road background with traffic-light housings drawn at each box;
    /// the lit bulb colour follows the state (red top or left, green bottom or right).
    RasterImage draw_scene(std::uint32_t width, std::uint32_t height, const std::vector<LightBox>& lights, std::uint64_t seed);

    /// n images with one to four separated lights each, some horizontal.
    Dataset make_mini_dataset(std::size_t n, std::uint32_t width, std::uint32_t height, std::uint64_t seed);

    std::vector<ScoredBox> as_detections(const std::vector<LightBox>& lights, double score = 1.0);

    /// Detector that reports the ground truth of whichever image it is shown.
    DetectionSet perfect_detection(const ImageAnnotation& img);

    /// Drops every detection of a light touched by a light transform, or a
    /// seeded 30% of detections for weather and camera transforms. `dropped`
    /// receives the indices removed.
    DetectionSet degraded_detection(const AugmentedLabels& labels, std::uint64_t seed, std::vector<std::size_t>* dropped = nullptr);
}
