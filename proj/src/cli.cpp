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

#include "lightaug/cli.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "CLI11.hpp"
#include "lightaug/dataset_io.hpp"
#include "lightaug/image_io.hpp"
#include "lightaug/metrics.hpp"
#include "lightaug/oracle.hpp"
#include "lightaug/rng.hpp"

using namespace std;
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace lightaug::cli
{
    namespace
    {
        using Clock = chrono::steady_clock;

        double seconds_since(Clock::time_point t0) { return chrono::duration<double>(Clock::now() - t0).count(); }

        [[noreturn]] void schema_fail(const string& source, const string& ptr, const string& what)
        {
            throw Error(Errc::schema_error, source + ": " + ptr + ": " + what);
        }

        void require_keys(const json& j, const string& source, const string& ptr, initializer_list<const char*> required,
                          initializer_list<const char*> allowed)
        {
            if (!j.is_object())
            {
                schema_fail(source, ptr, "expected an object");
            }
            for (const char* k : required)
            {
                if (!j.contains(k))
                {
                    schema_fail(source, ptr + "/" + k, "missing field");
                }
            }
            for (const auto& [k, v] : j.items())
            {
                if (find_if(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }) == allowed.end())
                {
                    schema_fail(source, ptr + "/" + k, "unknown field");
                }
            }
        }

        template <typename T>
        T get_as(const json& j, const string& source, const string& ptr)
        {
            try
            {
                if constexpr (is_same_v<T, uint64_t>)
                {
                    if (!j.is_number_unsigned())
                    {
                        schema_fail(source, ptr, "expected a non-negative integer");
                    }
                }
                else if constexpr (is_same_v<T, int>)
                {
                    if (!j.is_number_integer())
                    {
                        schema_fail(source, ptr, "expected an integer");
                    }
                }
                else if constexpr (is_same_v<T, double>)
                {
                    if (!j.is_number())
                    {
                        schema_fail(source, ptr, "expected a number");
                    }
                }
                else if constexpr (is_same_v<T, string>)
                {
                    if (!j.is_string())
                    {
                        schema_fail(source, ptr, "expected a string");
                    }
                }
                else if constexpr (is_same_v<T, bool>)
                {
                    if (!j.is_boolean())
                    {
                        schema_fail(source, ptr, "expected a boolean");
                    }
                }
                return j.get<T>();
            }
            catch (const json::exception& e)
            {
                schema_fail(source, ptr, e.what());
            }
        }

        Interval interval_from(const json& j, const string& source, const string& ptr)
        {
            if (!j.is_array() || j.size() != 2)
            {
                schema_fail(source, ptr, "expected [lo, hi]");
            }
            return {get_as<double>(j[0], source, ptr + "/0"), get_as<double>(j[1], source, ptr + "/1")};
        }

        string hex64(uint64_t v)
        {
            char buf[17];
            snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
            return buf;
        }

        // One image's result inside the worker pool.
        struct Slot
        {
            bool                  skipped = false;
            optional<string>      failure;
            AugmentedLabels       labels;
            vector<pair<string, double>> drawn;
            double                load    = 0;
            double                synth   = 0;
            double                write   = 0;
        };

        int augment_one_kind(TransformKind kind, const AugmentOptions& opt, const TransformParams& params,
                             const Annotations& ann, const string& digest, ostream& out, ostream& err)
        {
            const fs::path dir = opt.out / augmented_dirname(kind);
            if (fs::exists(dir / manifest_file))
            {
                fs::remove_all(dir / "images"); // stale pixels from an earlier run
            }

            const size_t n = ann.images.size();
            vector<Slot> slots(n);
            atomic<size_t> next{0};
            const auto     wall0 = Clock::now();

            auto worker = [&]() {
                for (size_t i = next++; i < n; i = next++)
                {
                    const ImageAnnotation& a    = ann.images[i];
                    Slot&                  slot = slots[i];
                    try
                    {
                        if (family(kind) == TransformFamily::Light && a.lights.empty())
                        {
                            slot.skipped = true;
                            continue;
                        }
                        auto         t0 = Clock::now();
                        LabeledImage img;
                        img.id     = a.id;
                        img.lights = a.lights;
                        img.pixels = load_canonical_image(opt.dataset, a.id);
                        if (img.pixels.width() != a.width || img.pixels.height() != a.height)
                        {
                            throw Error(Errc::schema_error, "image '" + a.id + "' dimensions differ from its annotation");
                        }
                        slot.load = seconds_since(t0);

                        t0                       = Clock::now();
                        TransformOutcome outcome = apply(kind, img, params, image_seed(opt.seed, a.id));
                        slot.synth               = seconds_since(t0);

                        t0 = Clock::now();
                        write_png(outcome.image.pixels, dir / image_relpath(a.id));
                        slot.write  = seconds_since(t0);
                        slot.labels = outcome.labels();
                        slot.drawn  = std::move(outcome.drawn);
                    }
                    catch (const Error& e)
                    {
                        if (e.code() == Errc::no_lights)
                        {
                            slot.skipped = true;
                        }
                        else
                        {
                            slot.failure = e.what();
                        }
                    }
                    catch (const exception& e)
                    {
                        slot.failure = e.what();
                    }
                }
            };

            const size_t   jobs = max<size_t>(1, min(opt.jobs, max<size_t>(n, 1)));
            vector<thread> pool;
            for (size_t k = 1; k < jobs; ++k)
            {
                pool.emplace_back(worker);
            }
            worker();
            for (auto& t : pool)
            {
                t.join();
            }

            // Deterministic reduction in dataset order.
            Annotations aug;
            aug.dataset = ann.dataset;
            RunManifest m;
            m.seed           = opt.seed;
            m.kind           = kind;
            m.params         = params;
            m.dataset_digest = digest;
            RunTimings timings;
            timings.jobs      = jobs;
            size_t attempted  = 0;
            for (size_t i = 0; i < n; ++i)
            {
                Slot& s = slots[i];
                if (s.skipped)
                {
                    m.skipped.push_back(ann.images[i].id);
                    continue;
                }
                ++attempted;
                if (s.failure)
                {
                    m.failures.push_back({ann.images[i].id, *s.failure});
                    err << "warning: " << to_string(kind) << ": image '" << ann.images[i].id << "' failed: " << *s.failure
                        << "\n";
                    continue;
                }
                aug.images.push_back(s.labels.annotation);
                m.images.push_back({ann.images[i].id, s.labels.seed, std::move(s.labels.notes), std::move(s.drawn)});
                timings.load_seconds += s.load;
                timings.synthesize_seconds += s.synth;
                timings.write_seconds += s.write;
                timings.per_image.emplace_back(ann.images[i].id, s.synth);
            }

            fs::create_directories(dir);
            write_file_atomic(dir / "annotations.json", dump_json(to_json(aug)));
            write_file_atomic(dir / manifest_file, dump_json(to_json(m)));
            ordered_json tj = to_json(timings);
            tj["wall_seconds"] = seconds_since(wall0);
            write_file_atomic(dir / timings_file, dump_json(tj));

            if (!m.skipped.empty())
            {
                err << "warning: " << to_string(kind) << ": skipped " << m.skipped.size() << " image(s) without lights\n";
            }
            out << augmented_dirname(kind) << ": " << aug.images.size() << " written, " << m.skipped.size()
                << " skipped, " << m.failures.size() << " failed\n";
            if (attempted > 0 && m.failures.size() == attempted)
            {
                err << "error: " << to_string(kind) << ": every image failed\n";
                return exit_usage;
            }
            return exit_ok;
        }

        template <typename F>
        int guarded(ostream& err, F&& body)
        {
            try
            {
                return body();
            }
            catch (const Error& e)
            {
                err << "error: " << errc_name(e.code()) << ": " << e.what() << "\n";
                return exit_code_for(e.code());
            }
            catch (const fs::filesystem_error& e)
            {
                err << "error: IoError: " << e.what() << "\n";
                return exit_usage;
            }
            catch (const json::exception& e)
            {
                err << "error: SchemaError: " << e.what() << "\n";
                return exit_usage;
            }
        }
    }

    int exit_code_for(Errc code)
    {
        switch (code)
        {
        case Errc::unknown_image_id:
        case Errc::mismatched_ids: return exit_mismatch;
        default: return exit_usage;
        }
    }

    ordered_json params_to_json(const TransformParams& p)
    {
        ordered_json j;
        j["rain_drop_size"] = {p.rain_drop_size.lo, p.rain_drop_size.hi};
        j["rain_speed"]     = {p.rain_speed.lo, p.rain_speed.hi};
        j["snow_severity"]  = p.snow_severity;
        j["fog_severity"]   = p.fog_severity;
        j["oe_severity"]    = p.oe_severity;
        j["ue_severity"]    = p.ue_severity;
        j["mb_kernel"]      = p.mb_kernel;
        j["sc_pad_w"]       = p.sc_pad_w;
        j["sc_pad_h"]       = p.sc_pad_h;
        j["sc_label_mode"]  = p.sc_label_mode == ScaleLabelMode::ImageAffine ? "image_affine" : "fixed_center";
        return j;
    }

    TransformParams params_from_json(const json& j, const string& source)
    {
        require_keys(j, source, "", {},
                     {"rain_drop_size", "rain_speed", "snow_severity", "fog_severity", "oe_severity", "ue_severity",
                      "mb_kernel", "sc_pad_w", "sc_pad_h", "sc_label_mode"});
        TransformParams p;
        if (j.contains("rain_drop_size")) p.rain_drop_size = interval_from(j["rain_drop_size"], source, "/rain_drop_size");
        if (j.contains("rain_speed")) p.rain_speed = interval_from(j["rain_speed"], source, "/rain_speed");
        if (j.contains("snow_severity")) p.snow_severity = get_as<int>(j["snow_severity"], source, "/snow_severity");
        if (j.contains("fog_severity")) p.fog_severity = get_as<int>(j["fog_severity"], source, "/fog_severity");
        if (j.contains("oe_severity")) p.oe_severity = get_as<int>(j["oe_severity"], source, "/oe_severity");
        if (j.contains("ue_severity")) p.ue_severity = get_as<int>(j["ue_severity"], source, "/ue_severity");
        if (j.contains("mb_kernel")) p.mb_kernel = get_as<int>(j["mb_kernel"], source, "/mb_kernel");
        if (j.contains("sc_pad_w")) p.sc_pad_w = get_as<double>(j["sc_pad_w"], source, "/sc_pad_w");
        if (j.contains("sc_pad_h")) p.sc_pad_h = get_as<double>(j["sc_pad_h"], source, "/sc_pad_h");
        if (j.contains("sc_label_mode"))
        {
            const string mode = get_as<string>(j["sc_label_mode"], source, "/sc_label_mode");
            if (mode == "image_affine")
            {
                p.sc_label_mode = ScaleLabelMode::ImageAffine;
            }
            else if (mode == "fixed_center")
            {
                p.sc_label_mode = ScaleLabelMode::FixedCenter;
            }
            else
            {
                schema_fail(source, "/sc_label_mode", "expected image_affine or fixed_center");
            }
        }
        p.validate();
        return p;
    }

    ordered_json notes_to_json(const vector<LightNote>& notes)
    {
        ordered_json arr = ordered_json::array();
        for (const auto& n : notes)
        {
            ordered_json j;
            j["action"]  = string(to_string(n.action));
            j["source"]  = n.source;
            j["offset"]  = n.offset;
            j["clamped"] = n.clamped;
            j["reason"]  = n.reason;
            arr.push_back(j);
        }
        return arr;
    }

    vector<LightNote> notes_from_json(const json& j, const string& source)
    {
        if (!j.is_array())
        {
            schema_fail(source, "notes", "expected an array");
        }
        vector<LightNote> out;
        for (size_t i = 0; i < j.size(); ++i)
        {
            const string ptr = "notes/" + std::to_string(i);
            const auto&  jn  = j[i];
            require_keys(jn, source, ptr, {"action", "source", "offset", "clamped", "reason"},
                         {"action", "source", "offset", "clamped", "reason"});
            LightNote n;
            auto      action = parse_light_action(get_as<string>(jn["action"], source, ptr + "/action"));
            if (!action)
            {
                schema_fail(source, ptr + "/action", "unknown action");
            }
            n.action  = *action;
            n.source  = static_cast<size_t>(get_as<uint64_t>(jn["source"], source, ptr + "/source"));
            n.offset  = get_as<double>(jn["offset"], source, ptr + "/offset");
            n.clamped = get_as<bool>(jn["clamped"], source, ptr + "/clamped");
            n.reason  = get_as<string>(jn["reason"], source, ptr + "/reason");
            out.push_back(std::move(n));
        }
        return out;
    }

    ordered_json to_json(const RunManifest& m)
    {
        ordered_json j;
        j["tool"]           = tool_name;
        j["version"]        = m.version;
        j["seed"]           = m.seed;
        j["transform"]      = string(to_string(m.kind));
        j["params"]         = params_to_json(m.params);
        j["dataset_digest"] = m.dataset_digest;
        j["images"]         = ordered_json::array();
        for (const auto& img : m.images)
        {
            ordered_json ji;
            ji["id"]    = img.id;
            ji["seed"]  = img.seed;
            ji["notes"] = notes_to_json(img.notes);
            ordered_json drawn = ordered_json::object();
            for (const auto& [k, v] : img.drawn)
            {
                drawn[k] = v;
            }
            ji["drawn"] = drawn;
            j["images"].push_back(ji);
        }
        j["skipped"]  = m.skipped;
        j["failures"] = ordered_json::array();
        for (const auto& f : m.failures)
        {
            j["failures"].push_back({{"id", f.id}, {"error", f.error}});
        }
        return j;
    }

    RunManifest manifest_from_json(const json& j, const string& source)
    {
        const initializer_list<const char*> keys = {"tool",   "version", "seed",    "transform", "params",
                                                    "dataset_digest", "images", "skipped", "failures"};
        require_keys(j, source, "", keys, keys);
        RunManifest m;
        m.version   = get_as<string>(j["version"], source, "/version");
        m.seed      = get_as<uint64_t>(j["seed"], source, "/seed");
        auto kind   = parse_transform_kind(get_as<string>(j["transform"], source, "/transform"));
        if (!kind)
        {
            schema_fail(source, "/transform", "unknown transform kind");
        }
        m.kind           = *kind;
        m.params         = params_from_json(j["params"], source);
        m.dataset_digest = get_as<string>(j["dataset_digest"], source, "/dataset_digest");
        if (!j["images"].is_array() || !j["skipped"].is_array() || !j["failures"].is_array())
        {
            schema_fail(source, "", "images, skipped and failures must be arrays");
        }
        for (size_t i = 0; i < j["images"].size(); ++i)
        {
            const string ptr = "/images/" + std::to_string(i);
            const auto&  ji  = j["images"][i];
            require_keys(ji, source, ptr, {"id", "seed", "notes", "drawn"}, {"id", "seed", "notes", "drawn"});
            ManifestImage img;
            img.id    = get_as<string>(ji["id"], source, ptr + "/id");
            img.seed  = get_as<uint64_t>(ji["seed"], source, ptr + "/seed");
            img.notes = notes_from_json(ji["notes"], source);
            if (!ji["drawn"].is_object())
            {
                schema_fail(source, ptr + "/drawn", "expected an object");
            }
            for (const auto& [k, v] : ji["drawn"].items())
            {
                img.drawn.emplace_back(k, get_as<double>(v, source, ptr + "/drawn/" + k));
            }
            m.images.push_back(std::move(img));
        }
        for (size_t i = 0; i < j["skipped"].size(); ++i)
        {
            m.skipped.push_back(get_as<string>(j["skipped"][i], source, "/skipped/" + std::to_string(i)));
        }
        for (size_t i = 0; i < j["failures"].size(); ++i)
        {
            const string ptr = "/failures/" + std::to_string(i);
            require_keys(j["failures"][i], source, ptr, {"id", "error"}, {"id", "error"});
            m.failures.push_back({get_as<string>(j["failures"][i]["id"], source, ptr + "/id"),
                                  get_as<string>(j["failures"][i]["error"], source, ptr + "/error")});
        }
        return m;
    }

    RunManifest read_manifest(const fs::path& dir)
    {
        const fs::path file = dir / manifest_file;
        if (!fs::is_regular_file(file))
        {
            throw Error(Errc::mismatched_ids, "no run manifest at '" + file.string()
                                                  + "'; the augmented directory must come from the augment command");
        }
        return manifest_from_json(parse_json_file(file), file.string());
    }

    double RunTimings::mean_synthesis() const
    {
        return per_image.empty() ? 0.0 : synthesize_seconds / static_cast<double>(per_image.size());
    }

    ordered_json to_json(const RunTimings& t)
    {
        ordered_json j;
        j["jobs"]   = t.jobs;
        j["stages"] = {{"load", t.load_seconds}, {"synthesize", t.synthesize_seconds}, {"write", t.write_seconds}};
        j["mean_synthesis_seconds"] = t.mean_synthesis();
        j["per_image"]              = ordered_json::array();
        for (const auto& [id, s] : t.per_image)
        {
            j["per_image"].push_back({{"id", id}, {"synthesize", s}});
        }
        return j;
    }

    string augmented_dirname(TransformKind kind) { return string(to_string(kind)) + "+"; }

    size_t default_jobs()
    {
        if (const char* env = getenv("TIGAUG_JOBS"))
        {
            char*        end = nullptr;
            const long   v   = strtol(env, &end, 10);
            if (end != env && *end == '\0' && v > 0)
            {
                return static_cast<size_t>(v);
            }
        }
        return max(1u, thread::hardware_concurrency());
    }

    int cmd_ingest(const IngestOptions& opt, ostream& out, ostream& err)
    {
        return guarded(err, [&]() -> int {
            if (!fs::exists(opt.input))
            {
                err << "error: IoError: input path '" << opt.input.string() << "' does not exist\n";
                return exit_usage;
            }
            ParseResult parsed;
            if (opt.format == "lisa")
            {
                parsed = parse_lisa(opt.input);
            }
            else if (opt.format == "bosch")
            {
                parsed = parse_bosch(opt.input);
            }
            else if (opt.format == "canonical")
            {
                parsed.dataset = read_canonical(opt.input);
            }
            else
            {
                err << "error: unknown format '" << opt.format << "' (expected lisa, bosch or canonical)\n";
                return exit_usage;
            }
            for (const auto& w : parsed.report.warnings)
            {
                err << "warning: " << w << "\n";
            }
            auto [ds, stats] = preprocess(std::move(parsed.dataset), {opt.dedup, opt.drop_monochrome});
            if (opt.split_seed)
            {
                ds = split_441(std::move(ds), *opt.split_seed);
            }
            write_canonical(ds, opt.out);

            ordered_json j;
            j["images"]      = ds.images.size();
            j["duplicates"]  = stats.duplicates;
            j["monochrome"]  = stats.monochrome;
            j["dropped_off"] = parsed.report.dropped_off;
            j["warnings"]    = parsed.report.warnings.size();
            out << j.dump() << "\n";
            return exit_ok;
        });
    }

    int cmd_augment(const AugmentOptions& opt, ostream& out, ostream& err)
    {
        return guarded(err, [&]() -> int {
            vector<TransformKind> kinds;
            if (opt.transform == "all")
            {
                kinds.assign(begin(all_transform_kinds), end(all_transform_kinds));
            }
            else if (auto k = parse_transform_kind(opt.transform))
            {
                kinds.push_back(*k);
            }
            else
            {
                err << "error: unknown transform '" << opt.transform << "'\n";
                return exit_usage;
            }
            TransformParams params;
            if (opt.params)
            {
                params = params_from_json(parse_json_file(*opt.params), opt.params->string());
            }
            params.validate();
            if (!fs::is_directory(opt.dataset))
            {
                err << "error: IoError: dataset directory '" << opt.dataset.string() << "' does not exist\n";
                return exit_usage;
            }
            const Annotations ann    = read_annotations(opt.dataset);
            const string      digest = hex64(dataset_digest(opt.dataset));
            int               worst  = exit_ok;
            for (TransformKind k : kinds)
            {
                worst = max(worst, augment_one_kind(k, opt, params, ann, digest, out, err));
            }
            return worst;
        });
    }

    int cmd_evaluate(const EvaluateOptions& opt, ostream& out, ostream& err)
    {
        return guarded(err, [&]() -> int {
            auto protocol = metrics::parse_protocol(opt.protocol);
            if (!protocol)
            {
                err << "error: unknown protocol '" << opt.protocol << "' (expected coco101 or allpoint)\n";
                return exit_usage;
            }
            const Annotations   gt  = read_annotations(opt.ground_truth);
            const DetectionFile det = read_detections(opt.detections);
            metrics::EvalConfig cfg;
            cfg.protocol = *protocol;
            out << dump_json(metrics::to_json(metrics::map_5095(gt.images, det.results, cfg)));
            return exit_ok;
        });
    }

    int cmd_check_mr(const CheckMrOptions& opt, ostream& out, ostream& err)
    {
        return guarded(err, [&]() -> int {
            auto protocol = metrics::parse_protocol(opt.protocol);
            if (!protocol || (opt.format != "table" && opt.format != "json"))
            {
                err << "error: --protocol must be coco101|allpoint and --format table|json\n";
                return exit_usage;
            }
            const RunManifest m   = read_manifest(opt.augmented);
            const Annotations org = read_annotations(opt.original);
            const Annotations aug = read_annotations(opt.augmented);
            if (aug.images.size() != m.images.size())
            {
                throw Error(Errc::mismatched_ids, "manifest and annotations of '"
                                                      + opt.augmented.string() + "' list different images");
            }
            vector<AugmentedLabels> labels;
            for (size_t i = 0; i < aug.images.size(); ++i)
            {
                if (aug.images[i].id != m.images[i].id)
                {
                    throw Error(Errc::mismatched_ids, "manifest entry " + std::to_string(i) + " is '"
                                                          + m.images[i].id + "' but annotations list '"
                                                          + aug.images[i].id + "'");
                }
                labels.push_back({aug.images[i], m.kind, m.images[i].seed, m.images[i].notes});
            }
            const DetectionFile det_o = read_detections(opt.det_original);
            const DetectionFile det_a = read_detections(opt.det_augmented);
            metrics::EvalConfig cfg;
            cfg.protocol = *protocol;
            const oracle::MrReport report = oracle::check_mr(m.kind, org.images, labels, det_o.results, det_a.results, cfg);

            const string json_text = dump_json(oracle::to_json(report));
            if (opt.json_out)
            {
                write_file_atomic(*opt.json_out, json_text);
            }
            out << (opt.format == "json" ? json_text : oracle::to_table(report));
            return report.violations.empty() ? exit_ok : exit_violation;
        });
    }

    int run(const vector<string>& args, ostream& out, ostream& err)
    {
        CLI::App app{"Traffic-light image augmentation and metamorphic test oracle", tool_name};
        app.set_version_flag("--version", tool_version);
        app.require_subcommand(1);

        IngestOptions ingest;
        auto*         sub_ingest = app.add_subcommand("ingest", "Convert a LISA, Bosch or canonical dataset");
        sub_ingest->add_option("--format", ingest.format, "lisa|bosch|canonical")
            ->check(CLI::IsMember({"lisa", "bosch", "canonical"}))
            ->required();
        sub_ingest->add_option("--input", ingest.input, "Dataset root, YAML file or canonical directory")->required();
        sub_ingest->add_option("--out", ingest.out, "Output directory")->required();
        sub_ingest->add_flag("--dedup", ingest.dedup, "Drop byte-identical images");
        sub_ingest->add_flag("--drop-monochrome", ingest.drop_monochrome, "Drop grayscale images");
        sub_ingest->add_option("--split-seed", ingest.split_seed, "Assign a 4:1:1 train/val/test split");

        AugmentOptions augment;
        augment.jobs     = default_jobs();
        auto* sub_augment = app.add_subcommand("augment", "Write augmented KIND+ datasets");
        sub_augment->add_option("--dataset", augment.dataset, "Canonical dataset directory")->required();
        sub_augment->add_option("--transform", augment.transform, "Transform kind or 'all'")->required();
        sub_augment->add_option("--seed", augment.seed, "Global seed")->capture_default_str();
        sub_augment->add_option("--params", augment.params, "Transform parameter JSON file");
        sub_augment->add_option("--out", augment.out, "Output directory")->required();
        sub_augment->add_option("--jobs", augment.jobs, "Worker threads (default TIGAUG_JOBS)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();

        EvaluateOptions evaluate;
        auto*           sub_eval = app.add_subcommand("evaluate", "Print mAP@[.50:.95] of detections");
        sub_eval->add_option("--ground-truth", evaluate.ground_truth, "Canonical dataset directory")->required();
        sub_eval->add_option("--detections", evaluate.detections, "Detection JSON file")->required();
        sub_eval->add_option("--protocol", evaluate.protocol, "coco101|allpoint")->capture_default_str();

        CheckMrOptions check;
        auto*          sub_check = app.add_subcommand("check-mr", "Check metamorphic relations");
        sub_check->add_option("--original", check.original, "Original canonical dataset")->required();
        sub_check->add_option("--augmented", check.augmented, "Augmented KIND+ directory")->required();
        sub_check->add_option("--det-original", check.det_original, "Detections on original images")->required();
        sub_check->add_option("--det-augmented", check.det_augmented, "Detections on augmented images")->required();
        sub_check->add_option("--protocol", check.protocol, "coco101|allpoint")->capture_default_str();
        sub_check->add_option("--format", check.format, "Report on stdout: table|json")->capture_default_str();
        sub_check->add_option("--json", check.json_out, "Also write the JSON report here");

        vector<const char*> argv;
        for (const auto& a : args)
        {
            argv.push_back(a.c_str());
        }
        try
        {
            app.parse(static_cast<int>(argv.size()), argv.data());
        }
        catch (const CLI::ParseError& e)
        {
            const int code = app.exit(e, out, err);
            return code == 0 ? exit_ok : exit_usage;
        }

        if (sub_ingest->parsed())
        {
            return cmd_ingest(ingest, out, err);
        }
        if (sub_augment->parsed())
        {
            return cmd_augment(augment, out, err);
        }
        if (sub_eval->parsed())
        {
            return cmd_evaluate(evaluate, out, err);
        }
        return cmd_check_mr(check, out, err);
    }
}
