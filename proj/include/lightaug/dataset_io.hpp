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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lightaug/core_model.hpp"

namespace lightaug
{
    enum class Split
    {
        Train,
        Val,
        Test,
    };

    std::string_view to_string(Split s);

    struct Dataset
    {
        std::string               name;
        std::vector<LabeledImage> images;
        /// Empty, or one tag per image.
        std::vector<Split>        split;
        /// Seed that produced `split`, when present.
        std::optional<std::uint64_t> split_seed;

        friend bool operator==(const Dataset&, const Dataset&) = default;
    };

    /// Contents of a canonical annotations.json.
    struct Annotations
    {
        std::string                  dataset;
        std::vector<ImageAnnotation> images;

        friend bool operator==(const Annotations&, const Annotations&) = default;
    };

    Annotations annotations_of(const Dataset& d);

    struct ParseReport
    {
        std::vector<std::string> warnings;
        std::size_t              dropped_off = 0; ///< Bosch lights labelled "off"
    };

    struct ParseResult
    {
        Dataset     dataset;
        ParseReport report;
    };

    /// Dataset tag tables. Unknown tags yield nullopt.
    std::optional<LightState> map_lisa_tag(std::string_view tag);
    std::optional<LightState> map_bosch_label(std::string_view label);

    /// Reads every *.csv annotation file under root (semicolon separated:
    /// filename;tag;x1;y1;x2;y2;...). Frames that cannot be found are
    /// reported as warnings. Throws Error(malformed_row | unknown_tag).
    ParseResult parse_lisa(const std::filesystem::path& root);

    /// Reads a Bosch-style YAML list of {path, boxes:[{label, x_min, y_min,
    /// x_max, y_max, occluded}]}. Throws Error(malformed_entry | unknown_tag).
    ParseResult parse_bosch(const std::filesystem::path& yaml_path);

    struct PreprocessOptions
    {
        bool dedup           = true;
        bool drop_monochrome = false;
    };

    struct PreprocessStats
    {
        std::size_t duplicates = 0;
        std::size_t monochrome = 0;

        friend bool operator==(const PreprocessStats&, const PreprocessStats&) = default;
    };

    bool is_monochrome(const RasterImage& img);

    /// Removes byte-identical images (first occurrence kept) and, when
    /// requested, images whose three channels agree at every pixel.
    std::pair<Dataset, PreprocessStats> preprocess(Dataset d, const PreprocessOptions& opt = {});

    /// Seeded shuffle, then floor(4n/6) train, floor(n/6) val, the rest test.
    /// Throws Error(too_small) below six images.
    Dataset split_441(Dataset d, std::uint64_t seed);

    // Canonical on-disk layout:
    //   DIR/annotations.json
    //   DIR/images/<id with its extension replaced by .png>
    //   DIR/split.json (only when the dataset carries a split)

    std::filesystem::path image_relpath(std::string_view id);

    nlohmann::ordered_json to_json(const Annotations& a);
    /// Strict: unknown or missing fields raise Error(schema_error) naming the
    /// JSON pointer of the offending value.
    Annotations annotations_from_json(const nlohmann::json& j, const std::string& source);

    /// Two-space indented JSON with a trailing newline, the form every
    /// file written by the toolkit uses.
    std::string dump_json(const nlohmann::ordered_json& j);
    nlohmann::json parse_json_file(const std::filesystem::path& path);

    void        write_canonical(const Dataset& d, const std::filesystem::path& dir);
    Dataset     read_canonical(const std::filesystem::path& dir);
    Annotations read_annotations(const std::filesystem::path& dir);
    RasterImage load_canonical_image(const std::filesystem::path& dir, std::string_view id);

    struct DetectionFile
    {
        std::string               model;
        std::vector<DetectionSet> results;

        friend bool operator==(const DetectionFile&, const DetectionFile&) = default;
    };

    nlohmann::ordered_json to_json(const DetectionFile& f);
    DetectionFile detections_from_json(const nlohmann::json& j, const std::string& source);
    DetectionFile read_detections(const std::filesystem::path& path);
    void          write_detections(const DetectionFile& f, const std::filesystem::path& path);

    /// 64-bit digest of a canonical dataset directory (annotations and pixels).
    std::uint64_t dataset_digest(const std::filesystem::path& dir);
}
