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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lightaug/core_model.hpp"
#include "lightaug/transforms.hpp"

namespace lightaug::cli
{
    inline constexpr const char* tool_name    = "lightaug";
    inline constexpr const char* tool_version = "0.1.0";

    enum ExitCode : int
    {
        exit_ok        = 0,
        exit_violation = 1,
        exit_usage     = 2,
        exit_mismatch  = 3,
    };

    /// Exit code for a library error.
    int exit_code_for(Errc code);

    nlohmann::ordered_json params_to_json(const TransformParams& p);
    /// Missing keys keep their defaults; unknown keys raise Error(schema_error).
    TransformParams params_from_json(const nlohmann::json& j, const std::string& source);

    nlohmann::ordered_json notes_to_json(const std::vector<LightNote>& notes);
    std::vector<LightNote> notes_from_json(const nlohmann::json& j, const std::string& source);

    struct ManifestImage
    {
        std::string                                 id;
        std::uint64_t                               seed = 0;
        std::vector<LightNote>                      notes;
        std::vector<std::pair<std::string, double>> drawn;
    };

    struct ManifestFailure
    {
        std::string id;
        std::string error;
    };

    /// Everything needed to regenerate an augmented tree from its input.
    struct RunManifest
    {
        std::string                  version = tool_version;
        std::uint64_t                seed    = 0;
        TransformKind                kind    = TransformKind::RN;
        TransformParams              params;
        std::string                  dataset_digest;
        std::vector<ManifestImage>   images;
        std::vector<std::string>     skipped;
        std::vector<ManifestFailure> failures;
    };

    nlohmann::ordered_json to_json(const RunManifest& m);
    RunManifest manifest_from_json(const nlohmann::json& j, const std::string& source);
    RunManifest read_manifest(const std::filesystem::path& dir);

    /// Wall-clock seconds per stage and per image, kept beside the manifest
    /// in timings.json so that the manifest itself stays byte-reproducible.
    struct RunTimings
    {
        double                                      load_seconds       = 0;
        double                                      synthesize_seconds = 0;
        double                                      write_seconds      = 0;
        std::vector<std::pair<std::string, double>> per_image;
        std::size_t                                 jobs = 1;

        double mean_synthesis() const;
    };

    nlohmann::ordered_json to_json(const RunTimings& t);

    inline constexpr const char* manifest_file = "manifest.json";
    inline constexpr const char* timings_file  = "timings.json";

    /// Name of the augmented tree for a kind, e.g. "FG+".
    std::string augmented_dirname(TransformKind kind);

    /// Default for --jobs: TIGAUG_JOBS when set to a positive integer, else
    /// the hardware concurrency.
    std::size_t default_jobs();

    struct IngestOptions
    {
        std::string                  format = "canonical";
        std::filesystem::path        input;
        std::filesystem::path        out;
        bool                         dedup           = false;
        bool                         drop_monochrome = false;
        std::optional<std::uint64_t> split_seed;
    };

    struct AugmentOptions
    {
        std::filesystem::path                dataset;
        std::string                          transform;
        std::uint64_t                        seed = 0;
        std::optional<std::filesystem::path> params;
        std::filesystem::path                out;
        std::size_t                          jobs = 1;
    };

    struct EvaluateOptions
    {
        std::filesystem::path ground_truth;
        std::filesystem::path detections;
        std::string           protocol = "coco101";
    };

    struct CheckMrOptions
    {
        std::filesystem::path                original;
        std::filesystem::path                augmented;
        std::filesystem::path                det_original;
        std::filesystem::path                det_augmented;
        std::string                          protocol = "coco101";
        std::string                          format   = "table";
        std::optional<std::filesystem::path> json_out;
    };

    int cmd_ingest(const IngestOptions& opt, std::ostream& out, std::ostream& err);
    int cmd_augment(const AugmentOptions& opt, std::ostream& out, std::ostream& err);
    int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err);
    int cmd_check_mr(const CheckMrOptions& opt, std::ostream& out, std::ostream& err);

    /// Parses argv (argv[0] is the program name) and dispatches.
    int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
}
