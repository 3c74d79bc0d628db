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

#include "lightaug/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include <yaml-cpp/yaml.h>

#include "lightaug/image_io.hpp"
#include "lightaug/rng.hpp"

using namespace std;
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace lightaug
{
    namespace
    {
        string normalize_id(const fs::path& p)
        {
            string s = p.lexically_normal().generic_string();
            while (s.starts_with("./"))
            {
                s.erase(0, 2);
            }
            return s;
        }

        string trim(string_view s)
        {
            const auto b = s.find_first_not_of(" \t\r\n");
            if (b == string_view::npos)
            {
                return {};
            }
            const auto e = s.find_last_not_of(" \t\r\n");
            return string(s.substr(b, e - b + 1));
        }

        optional<double> parse_number(string_view s)
        {
            const string t = trim(s);
            double       v = 0;
            auto [ptr, ec] = from_chars(t.data(), t.data() + t.size(), v);
            if (ec != errc() || ptr != t.data() + t.size() || t.empty())
            {
                return nullopt;
            }
            return v;
        }

        // Strict reader over parsed JSON; every failure names the JSON pointer.
        class SchemaReader
        {
        public:
            explicit SchemaReader(string source)
                : m_source(std::move(source))
            {
            }

            [[noreturn]] void fail(const string& ptr, const string& what) const
            {
                throw Error(Errc::schema_error, m_source + ": " + (ptr.empty() ? "/" : ptr) + ": " + what);
            }

            const json& object(const json& j, const string& ptr, initializer_list<const char*> keys) const
            {
                if (!j.is_object())
                {
                    fail(ptr, "expected an object");
                }
                for (const char* k : keys)
                {
                    if (!j.contains(k))
                    {
                        fail(ptr + "/" + k, "missing field");
                    }
                }
                for (const auto& [k, v] : j.items())
                {
                    if (find_if(keys.begin(), keys.end(), [&](const char* name) { return k == name; }) == keys.end())
                    {
                        fail(ptr + "/" + k, "unknown field");
                    }
                }
                return j;
            }

            const json& array(const json& j, const string& ptr) const
            {
                if (!j.is_array())
                {
                    fail(ptr, "expected an array");
                }
                return j;
            }

            string str(const json& j, const string& ptr) const
            {
                if (!j.is_string())
                {
                    fail(ptr, "expected a string");
                }
                return j.get<string>();
            }

            double number(const json& j, const string& ptr) const
            {
                if (!j.is_number())
                {
                    fail(ptr, "expected a number");
                }
                return j.get<double>();
            }

            uint64_t unsigned_integer(const json& j, const string& ptr) const
            {
                if (!j.is_number_unsigned())
                {
                    fail(ptr, "expected a non-negative integer");
                }
                return j.get<uint64_t>();
            }

            LightState state(const json& j, const string& ptr) const
            {
                auto s = parse_light_state(str(j, ptr));
                if (!s)
                {
                    fail(ptr, "unknown state '" + j.get<string>() + "'");
                }
                return *s;
            }

            LightBox box(const json& j, const string& ptr) const
            {
                LightBox b;
                b.x1    = number(j["x1"], ptr + "/x1");
                b.y1    = number(j["y1"], ptr + "/y1");
                b.x2    = number(j["x2"], ptr + "/x2");
                b.y2    = number(j["y2"], ptr + "/y2");
                b.state = state(j["state"], ptr + "/state");
                if (!b.valid())
                {
                    fail(ptr, "box must satisfy x1 < x2 and y1 < y2");
                }
                return b;
            }

        private:
            string m_source;
        };

        ordered_json box_json(const LightBox& b)
        {
            ordered_json j;
            j["x1"]    = b.x1;
            j["y1"]    = b.y1;
            j["x2"]    = b.x2;
            j["y2"]    = b.y2;
            j["state"] = to_string(b.state);
            return j;
        }

        // Loads a frame and fits its boxes to the frame, reporting any clamping.
        bool attach_pixels(LabeledImage& img, const fs::path& file, ParseReport& report)
        {
            if (!fs::is_regular_file(file))
            {
                report.warnings.push_back("missing image '" + file.generic_string() + "' for id '" + img.id + "'");
                return false;
            }
            img.pixels = read_image(file);
            vector<LightBox> kept;
            for (const LightBox& b : img.lights)
            {
                auto c = clamp_box(b, img.pixels.width(), img.pixels.height());
                if (!c)
                {
                    report.warnings.push_back("box outside image '" + img.id + "' dropped");
                    continue;
                }
                if (!(*c == b))
                {
                    report.warnings.push_back("box clamped to the bounds of image '" + img.id + "'");
                }
                kept.push_back(*c);
            }
            img.lights = std::move(kept);
            return true;
        }

        const map<string, LightState, less<>>& lisa_tags()
        {
            static const map<string, LightState, less<>> table = {
                {"stop", LightState::Stop},
                {"stopLeft", LightState::StopLeft},
                {"go", LightState::Go},
                {"goForward", LightState::Go},
                {"goLeft", LightState::GoLeft},
                {"warning", LightState::Warning},
                {"warningLeft", LightState::Warning},
            };
            return table;
        }

        const map<string, LightState, less<>>& bosch_labels()
        {
            static const map<string, LightState, less<>> table = {
                {"Red", LightState::Stop},
                {"RedStraight", LightState::Stop},
                {"RedRight", LightState::Stop},
                {"RedLeft", LightState::StopLeft},
                {"RedStraightLeft", LightState::StopLeft},
                {"Yellow", LightState::Warning},
                {"Green", LightState::Go},
                {"GreenStraight", LightState::Go},
                {"GreenRight", LightState::Go},
                {"GreenStraightRight", LightState::Go},
                {"GreenLeft", LightState::GoLeft},
                {"GreenStraightLeft", LightState::GoLeft},
            };
            return table;
        }
    }

    string_view to_string(Split s)
    {
        switch (s)
        {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
        }
        return "?";
    }

    Annotations annotations_of(const Dataset& d)
    {
        Annotations a;
        a.dataset = d.name;
        for (const auto& img : d.images)
        {
            a.images.push_back(annotation_of(img));
        }
        return a;
    }

    optional<LightState> map_lisa_tag(string_view tag)
    {
        const auto& t  = lisa_tags();
        auto        it = t.find(tag);
        return it == t.end() ? nullopt : optional<LightState>(it->second);
    }

    optional<LightState> map_bosch_label(string_view label)
    {
        const auto& t  = bosch_labels();
        auto        it = t.find(label);
        return it == t.end() ? nullopt : optional<LightState>(it->second);
    }

    ParseResult parse_lisa(const fs::path& root)
    {
        if (!fs::is_directory(root))
        {
            throw Error(Errc::io_error, "LISA root '" + root.string() + "' is not a directory");
        }
        vector<fs::path> csvs;
        for (const auto& entry : fs::recursive_directory_iterator(root))
        {
            if (entry.is_regular_file() && entry.path().extension() == ".csv")
            {
                csvs.push_back(entry.path());
            }
        }
        sort(csvs.begin(), csvs.end());

        ParseResult                    result;
        result.dataset.name = root.filename().empty() ? root.parent_path().filename().string() : root.filename().string();
        vector<pair<fs::path, LabeledImage>> frames;
        unordered_map<string, size_t>        index;

        for (const fs::path& csv : csvs)
        {
            ifstream in(csv);
            if (!in)
            {
                throw Error(Errc::io_error, "cannot open '" + csv.string() + "'");
            }
            const fs::path dir = csv.parent_path();
            string         line;
            size_t         line_no = 0;
            while (getline(in, line))
            {
                ++line_no;
                const string where = csv.generic_string() + ":" + std::to_string(line_no);
                if (trim(line).empty())
                {
                    continue;
                }
                vector<string> fields;
                stringstream   ss(line);
                string         f;
                while (getline(ss, f, ';'))
                {
                    fields.push_back(trim(f));
                }
                if (!fields.empty() && fields[0] == "Filename")
                {
                    continue; // header
                }
                if (fields.size() < 6)
                {
                    throw Error(Errc::malformed_row, "MalformedRow(" + where + "): expected at least 6 fields");
                }
                auto state = map_lisa_tag(fields[1]);
                if (!state)
                {
                    throw Error(Errc::unknown_tag, "UnknownTag(\"" + fields[1] + "\") at " + where);
                }
                LightBox b;
                b.state = *state;
                double* coords[4] = {&b.x1, &b.y1, &b.x2, &b.y2};
                for (int k = 0; k < 4; ++k)
                {
                    auto v = parse_number(fields[2 + k]);
                    if (!v)
                    {
                        throw Error(Errc::malformed_row, "MalformedRow(" + where + "): bad coordinate '" + fields[2 + k] + "'");
                    }
                    *coords[k] = *v;
                }
                if (!b.valid())
                {
                    throw Error(Errc::malformed_row, "MalformedRow(" + where + "): box must have positive width and height");
                }

                // Frames live next to the CSV, under the dataset root, or in a frames/ folder.
                const fs::path name(fields[0]);
                const fs::path candidates[] = {dir / name, root / name, dir / "frames" / name.filename(),
                                               root / "frames" / name.filename()};
                fs::path file = candidates[0];
                for (const auto& c : candidates)
                {
                    if (fs::is_regular_file(c))
                    {
                        file = c;
                        break;
                    }
                }
                const string id = normalize_id(fs::is_regular_file(file) ? file.lexically_relative(root) : name);
                auto [it, inserted] = index.emplace(id, frames.size());
                if (inserted)
                {
                    LabeledImage img;
                    img.id = id;
                    frames.emplace_back(file, std::move(img));
                }
                frames[it->second].second.lights.push_back(b);
            }
        }

        for (auto& [file, img] : frames)
        {
            if (attach_pixels(img, file, result.report))
            {
                result.dataset.images.push_back(std::move(img));
            }
        }
        return result;
    }

    ParseResult parse_bosch(const fs::path& yaml_path)
    {
        YAML::Node root;
        try
        {
            root = YAML::LoadFile(yaml_path.string());
        }
        catch (const YAML::BadFile&)
        {
            throw Error(Errc::io_error, "cannot open '" + yaml_path.string() + "'");
        }
        catch (const YAML::Exception& e)
        {
            throw Error(Errc::malformed_entry, "MalformedEntry: " + yaml_path.string() + ": " + e.what());
        }
        if (!root.IsSequence())
        {
            throw Error(Errc::malformed_entry, "MalformedEntry: " + yaml_path.string() + ": top level must be a list");
        }

        ParseResult    result;
        result.dataset.name = yaml_path.stem().string();
        const fs::path base = yaml_path.parent_path();
        set<string>    seen;
        for (size_t i = 0; i < root.size(); ++i)
        {
            const YAML::Node entry = root[i];
            auto malformed = [&](const string& why) {
                return Error(Errc::malformed_entry, "MalformedEntry(" + std::to_string(i) + "): " + why);
            };
            if (!entry.IsMap() || !entry["path"] || !entry["path"].IsScalar())
            {
                throw malformed("entry needs a 'path'");
            }
            const YAML::Node boxes = entry["boxes"];
            if (boxes && !boxes.IsSequence() && !boxes.IsNull())
            {
                throw malformed("'boxes' must be a list");
            }
            LabeledImage img;
            const fs::path rel(entry["path"].as<string>());
            img.id = normalize_id(rel);
            if (!seen.insert(img.id).second)
            {
                result.report.warnings.push_back("duplicate entry for '" + img.id + "' ignored");
                continue;
            }
            if (boxes && boxes.IsSequence())
            {
                for (const YAML::Node& bn : boxes)
                {
                    if (!bn.IsMap() || !bn["label"])
                    {
                        throw malformed("box needs a 'label'");
                    }
                    const string label = bn["label"].as<string>();
                    if (label == "off")
                    {
                        ++result.report.dropped_off;
                        continue;
                    }
                    auto state = map_bosch_label(label);
                    if (!state)
                    {
                        throw Error(Errc::unknown_tag, "UnknownTag(\"" + label + "\") in entry " + std::to_string(i));
                    }
                    LightBox b;
                    b.state = *state;
                    try
                    {
                        b.x1 = bn["x_min"].as<double>();
                        b.y1 = bn["y_min"].as<double>();
                        b.x2 = bn["x_max"].as<double>();
                        b.y2 = bn["y_max"].as<double>();
                    }
                    catch (const YAML::Exception&)
                    {
                        throw malformed("box coordinates x_min, y_min, x_max, y_max must be numbers");
                    }
                    if (!b.valid())
                    {
                        throw malformed("box must have positive width and height");
                    }
                    img.lights.push_back(b);
                }
            }
            const fs::path file = rel.is_absolute() ? rel : base / rel;
            if (attach_pixels(img, file, result.report))
            {
                result.dataset.images.push_back(std::move(img));
            }
        }
        return result;
    }

    bool is_monochrome(const RasterImage& img)
    {
        const auto& d = img.data();
        for (size_t i = 0; i < d.size(); i += 3)
        {
            if (d[i] != d[i + 1] || d[i] != d[i + 2])
            {
                return false;
            }
        }
        return true;
    }

    pair<Dataset, PreprocessStats> preprocess(Dataset d, const PreprocessOptions& opt)
    {
        PreprocessStats                           stats;
        Dataset                                   out;
        out.name       = d.name;
        out.split_seed = d.split_seed;
        unordered_multimap<uint64_t, size_t>      seen; // pixel hash -> index into out.images
        const bool                                has_split = !d.split.empty();
        for (size_t i = 0; i < d.images.size(); ++i)
        {
            LabeledImage& img = d.images[i];
            if (opt.drop_monochrome && is_monochrome(img.pixels))
            {
                ++stats.monochrome;
                continue;
            }
            if (opt.dedup)
            {
                const auto& px = img.pixels.data();
                uint64_t    h  = fnv1a64(string_view(reinterpret_cast<const char*>(px.data()), px.size()));
                h              = splitmix64(h ^ (uint64_t(img.pixels.width()) << 32 | img.pixels.height()));
                bool dup       = false;
                auto range     = seen.equal_range(h);
                for (auto it = range.first; it != range.second && !dup; ++it)
                {
                    dup = out.images[it->second].pixels == img.pixels;
                }
                if (dup)
                {
                    ++stats.duplicates;
                    continue;
                }
                seen.emplace(h, out.images.size());
            }
            out.images.push_back(std::move(img));
            if (has_split)
            {
                out.split.push_back(d.split[i]);
            }
        }
        return {std::move(out), stats};
    }

    Dataset split_441(Dataset d, uint64_t seed)
    {
        const size_t n = d.images.size();
        if (n < 6)
        {
            throw Error(Errc::too_small, "split_441: need at least 6 images, have " + std::to_string(n));
        }
        vector<size_t> order(n);
        for (size_t i = 0; i < n; ++i)
        {
            order[i] = i;
        }
        Rng rng(seed);
        for (size_t i = n - 1; i > 0; --i)
        {
            const auto j = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(i)));
            swap(order[i], order[j]);
        }
        const size_t n_train = 4 * n / 6;
        const size_t n_val   = n / 6;
        d.split.assign(n, Split::Test);
        for (size_t k = 0; k < n; ++k)
        {
            d.split[order[k]] = k < n_train ? Split::Train : (k < n_train + n_val ? Split::Val : Split::Test);
        }
        d.split_seed = seed;
        return d;
    }

    fs::path image_relpath(string_view id)
    {
        fs::path p = fs::path("images") / fs::path(string(id));
        p.replace_extension(".png");
        return p;
    }

    ordered_json to_json(const Annotations& a)
    {
        ordered_json j;
        j["dataset"] = a.dataset;
        j["images"]  = ordered_json::array();
        for (const auto& img : a.images)
        {
            ordered_json ji;
            ji["id"]     = img.id;
            ji["width"]  = img.width;
            ji["height"] = img.height;
            ji["lights"] = ordered_json::array();
            for (const auto& b : img.lights)
            {
                ji["lights"].push_back(box_json(b));
            }
            j["images"].push_back(ji);
        }
        return j;
    }

    Annotations annotations_from_json(const json& j, const string& source)
    {
        SchemaReader r(source);
        r.object(j, "", {"dataset", "images"});
        Annotations a;
        a.dataset = r.str(j["dataset"], "/dataset");
        const json& images = r.array(j["images"], "/images");
        set<string> ids;
        for (size_t i = 0; i < images.size(); ++i)
        {
            const string ptr = "/images/" + std::to_string(i);
            const json&  ji  = r.object(images[i], ptr, {"id", "width", "height", "lights"});
            ImageAnnotation img;
            img.id = r.str(ji["id"], ptr + "/id");
            if (!ids.insert(img.id).second)
            {
                r.fail(ptr + "/id", "duplicate image id '" + img.id + "'");
            }
            const uint64_t w = r.unsigned_integer(ji["width"], ptr + "/width");
            const uint64_t h = r.unsigned_integer(ji["height"], ptr + "/height");
            if (w < 1 || h < 1 || w > UINT32_MAX || h > UINT32_MAX)
            {
                r.fail(ptr, "width and height must be >= 1");
            }
            img.width         = static_cast<uint32_t>(w);
            img.height        = static_cast<uint32_t>(h);
            const json& lights = r.array(ji["lights"], ptr + "/lights");
            for (size_t k = 0; k < lights.size(); ++k)
            {
                const string lp = ptr + "/lights/" + std::to_string(k);
                r.object(lights[k], lp, {"x1", "y1", "x2", "y2", "state"});
                LightBox b = r.box(lights[k], lp);
                if (!box_inside(b, img.width, img.height))
                {
                    r.fail(lp, "box lies outside the image");
                }
                img.lights.push_back(b);
            }
            a.images.push_back(std::move(img));
        }
        return a;
    }

    string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

    json parse_json_file(const fs::path& path)
    {
        const auto bytes = read_file(path);
        try
        {
            return json::parse(bytes.begin(), bytes.end());
        }
        catch (const json::parse_error& e)
        {
            throw Error(Errc::schema_error, path.string() + ": invalid JSON: " + e.what());
        }
    }

    void write_canonical(const Dataset& d, const fs::path& dir)
    {
        if (!d.split.empty() && d.split.size() != d.images.size())
        {
            throw Error(Errc::invalid_argument, "write_canonical: split tags must cover every image");
        }
        set<fs::path> files;
        for (const auto& img : d.images)
        {
            const fs::path rel = image_relpath(img.id);
            if (!files.insert(rel).second)
            {
                throw Error(Errc::invalid_argument, "write_canonical: two image ids map to '" + rel.generic_string() + "'");
            }
            write_png(img.pixels, dir / rel);
        }
        write_file_atomic(dir / "annotations.json", dump_json(to_json(annotations_of(d))));
        if (!d.split.empty())
        {
            ordered_json s;
            s["seed"] = d.split_seed.value_or(0);
            for (Split tag : {Split::Train, Split::Val, Split::Test})
            {
                ordered_json ids = ordered_json::array();
                for (size_t i = 0; i < d.images.size(); ++i)
                {
                    if (d.split[i] == tag)
                    {
                        ids.push_back(d.images[i].id);
                    }
                }
                s[string(to_string(tag))] = ids;
            }
            write_file_atomic(dir / "split.json", dump_json(s));
        }
    }

    Annotations read_annotations(const fs::path& dir)
    {
        const fs::path file = fs::is_directory(dir) ? dir / "annotations.json" : dir;
        return annotations_from_json(parse_json_file(file), file.string());
    }

    RasterImage load_canonical_image(const fs::path& dir, string_view id) { return read_image(dir / image_relpath(id)); }

    Dataset read_canonical(const fs::path& dir)
    {
        const Annotations a = read_annotations(dir);
        Dataset           d;
        d.name = a.dataset;
        for (const auto& ann : a.images)
        {
            LabeledImage img;
            img.id     = ann.id;
            img.lights = ann.lights;
            img.pixels = load_canonical_image(dir, ann.id);
            if (img.pixels.width() != ann.width || img.pixels.height() != ann.height)
            {
                throw Error(Errc::schema_error, (dir / "annotations.json").string() + ": image '" + ann.id
                                                    + "' dimensions differ from its PNG");
            }
            d.images.push_back(std::move(img));
        }

        const fs::path split_file = dir / "split.json";
        if (fs::exists(split_file))
        {
            const json   j = parse_json_file(split_file);
            SchemaReader r(split_file.string());
            r.object(j, "", {"seed", "train", "val", "test"});
            d.split_seed = r.unsigned_integer(j["seed"], "/seed");
            unordered_map<string, size_t> index;
            for (size_t i = 0; i < d.images.size(); ++i)
            {
                index.emplace(d.images[i].id, i);
            }
            vector<optional<Split>> tags(d.images.size());
            for (Split tag : {Split::Train, Split::Val, Split::Test})
            {
                const string key(to_string(tag));
                const json&  ids = r.array(j[key], "/" + key);
                for (size_t k = 0; k < ids.size(); ++k)
                {
                    const string ptr = "/" + key + "/" + std::to_string(k);
                    auto         it  = index.find(r.str(ids[k], ptr));
                    if (it == index.end() || tags[it->second])
                    {
                        r.fail(ptr, "unknown or repeated image id");
                    }
                    tags[it->second] = tag;
                }
            }
            for (const auto& t : tags)
            {
                if (!t)
                {
                    r.fail("", "split does not cover every image");
                }
                d.split.push_back(*t);
            }
        }
        return d;
    }

    ordered_json to_json(const DetectionFile& f)
    {
        ordered_json j;
        j["model"]   = f.model;
        j["results"] = ordered_json::array();
        for (const auto& ds : f.results)
        {
            ordered_json r;
            r["id"]         = ds.image_id;
            r["detections"] = ordered_json::array();
            for (const auto& sb : ds.detections)
            {
                ordered_json d = box_json(sb.box);
                d["score"]     = sb.score;
                r["detections"].push_back(d);
            }
            j["results"].push_back(r);
        }
        return j;
    }

    DetectionFile detections_from_json(const json& j, const string& source)
    {
        SchemaReader r(source);
        r.object(j, "", {"model", "results"});
        DetectionFile f;
        f.model            = r.str(j["model"], "/model");
        const json& results = r.array(j["results"], "/results");
        for (size_t i = 0; i < results.size(); ++i)
        {
            const string ptr = "/results/" + std::to_string(i);
            const json&  jr  = r.object(results[i], ptr, {"id", "detections"});
            DetectionSet ds;
            ds.image_id    = r.str(jr["id"], ptr + "/id");
            const json& dets = r.array(jr["detections"], ptr + "/detections");
            for (size_t k = 0; k < dets.size(); ++k)
            {
                const string dp = ptr + "/detections/" + std::to_string(k);
                r.object(dets[k], dp, {"x1", "y1", "x2", "y2", "state", "score"});
                ScoredBox sb;
                sb.box   = r.box(dets[k], dp);
                sb.score = r.number(dets[k]["score"], dp + "/score");
                if (!(sb.score >= 0.0 && sb.score <= 1.0))
                {
                    r.fail(dp + "/score", "score must lie in [0,1]");
                }
                ds.detections.push_back(sb);
            }
            f.results.push_back(std::move(ds));
        }
        return f;
    }

    DetectionFile read_detections(const fs::path& path)
    {
        return detections_from_json(parse_json_file(path), path.string());
    }

    void write_detections(const DetectionFile& f, const fs::path& path)
    {
        write_file_atomic(path, dump_json(to_json(f)));
    }

    uint64_t dataset_digest(const fs::path& dir)
    {
        const auto  ann = read_file(dir / "annotations.json");
        uint64_t    h   = fnv1a64(string_view(reinterpret_cast<const char*>(ann.data()), ann.size()));
        const auto  a   = annotations_from_json(json::parse(ann.begin(), ann.end()), (dir / "annotations.json").string());
        for (const auto& img : a.images)
        {
            const auto bytes = read_file(dir / image_relpath(img.id));
            h                = fnv1a64(string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), h);
        }
        return h;
    }
}
