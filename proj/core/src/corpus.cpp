#include "liqd/corpus.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "liqd/image_io.hpp"
#include "parallel.hpp"

namespace liqd {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json spec_to_json(const SceneSpec& s) {
    return json{{"width", s.width},
                {"height", s.height},
                {"container",
                 {{"top", s.container.top},
                  {"left", s.container.left},
                  {"bottom", s.container.bottom},
                  {"right", s.container.right}}},
                {"wall_thickness", s.wall_thickness},
                {"gray_background", s.gray_background},
                {"gray_wall", s.gray_wall},
                {"gray_air", s.gray_air},
                {"gray_liquid", s.gray_liquid},
                {"noise_sigma", s.noise_sigma},
                {"seed", s.seed}};
}

SceneSpec spec_from_json(const json& j) {
    SceneSpec s;
    s.width = j.at("width").get<int>();
    s.height = j.at("height").get<int>();
    const json& c = j.at("container");
    s.container = {c.at("top").get<int>(), c.at("left").get<int>(), c.at("bottom").get<int>(),
                   c.at("right").get<int>()};
    s.wall_thickness = j.at("wall_thickness").get<int>();
    s.gray_background = j.at("gray_background").get<int>();
    s.gray_wall = j.at("gray_wall").get<int>();
    s.gray_air = j.at("gray_air").get<int>();
    s.gray_liquid = j.at("gray_liquid").get<int>();
    s.noise_sigma = j.at("noise_sigma").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
}

json scenario_to_json(const Scenario& s) {
    return json{{"kind", std::string(to_string(s.kind))},
                {"frames", s.frames},
                {"level_start", s.level_start},
                {"level_end", s.level_end},
                {"jitter", s.jitter},
                {"shift_px", s.shift_px}};
}

Scenario scenario_from_json(const json& j) {
    Scenario s;
    s.kind = parse_level_state(j.at("kind").get<std::string>());
    s.frames = j.at("frames").get<int>();
    s.level_start = j.at("level_start").get<double>();
    s.level_end = j.at("level_end").get<double>();
    s.jitter = j.value("jitter", 0.0);
    s.shift_px = j.value("shift_px", 0);
    return s;
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw CorpusError(path, "cannot open");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw CorpusError(path, e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CorpusError(path, "cannot write");
    out << text;
    if (!out) throw CorpusError(path, "write failed");
}

SequenceTruth truth_from_json(const fs::path& path) {
    const json j = read_json(path);
    try {
        SequenceTruth t;
        t.levels = j.at("levels").get<std::vector<double>>();
        for (const auto& name : j.at("labels")) t.labels.push_back(parse_level_state(name.get<std::string>()));
        if (j.contains("spec") && !j["spec"].is_null()) t.spec = spec_from_json(j["spec"]);
        if (j.contains("scenario") && !j["scenario"].is_null()) t.scenario = scenario_from_json(j["scenario"]);
        return t;
    } catch (const std::exception& e) {
        throw CorpusError(path, e.what());
    }
}

CorpusSequence open_sequence(const fs::path& dir, const std::string& name, bool require_truth) {
    CorpusSequence seq;
    seq.name = name;
    seq.dir = dir;
    if (!fs::is_directory(dir / "frames")) throw CorpusError(dir / "frames", "missing frames directory");
    while (fs::exists(seq.frame_path(seq.frame_count))) ++seq.frame_count;
    if (seq.frame_count < 2) throw CorpusError(seq.frame_path(seq.frame_count), "sequence needs at least two frames");

    const fs::path truth_path = dir / "truth.json";
    if (fs::exists(truth_path)) {
        seq.truth = truth_from_json(truth_path);
        if (seq.truth->levels.size() != seq.frame_count || seq.truth->labels.size() + 1 != seq.frame_count) {
            throw CorpusError(truth_path, "levels/labels do not match the frame count " +
                                              std::to_string(seq.frame_count));
        }
    } else if (require_truth) {
        throw CorpusError(truth_path, "missing ground truth");
    }
    return seq;
}

}  // namespace

CorpusError::CorpusError(const fs::path& path, const std::string& what)
    : std::runtime_error(path.string() + ": " + what), path_(path) {}

std::string frame_file_name(std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04zu.png", k);
    return buf;
}

fs::path CorpusSequence::frame_path(std::size_t k) const { return dir / "frames" / frame_file_name(k); }
fs::path CorpusSequence::mask_path(std::size_t k) const { return dir / "masks" / frame_file_name(k); }

Corpus open_corpus(const fs::path& root, bool require_truth) {
    if (!fs::is_directory(root)) throw CorpusError(root, "corpus directory not found");
    Corpus corpus;
    corpus.root = root;
    const fs::path manifest = root / "corpus.json";
    if (!fs::exists(manifest)) {
        corpus.sequences.push_back(open_sequence(root, root.filename().string(), require_truth));
        return corpus;
    }
    const json j = read_json(manifest);
    if (!j.contains("sequences") || !j["sequences"].is_array()) throw CorpusError(manifest, "no sequence list");
    for (const auto& entry : j["sequences"]) {
        if (!entry.is_string()) throw CorpusError(manifest, "sequence entries must be strings");
        const std::string name = entry.get<std::string>();
        corpus.sequences.push_back(open_sequence(root / name, name, require_truth));
    }
    if (corpus.sequences.empty()) throw CorpusError(manifest, "corpus is empty");
    return corpus;
}

RasterImage load_frame(const CorpusSequence& seq, std::size_t k) {
    const fs::path p = seq.frame_path(k);
    if (!fs::exists(p)) throw CorpusError(p, "missing frame");
    try {
        return read_image(p);
    } catch (const std::exception& e) {
        throw CorpusError(p, e.what());
    }
}

BinaryMask load_mask(const CorpusSequence& seq, std::size_t k) {
    const fs::path p = seq.mask_path(k);
    if (!fs::exists(p)) throw CorpusError(p, "missing mask");
    try {
        return BinaryMask::from_image(read_image(p));
    } catch (const std::exception& e) {
        throw CorpusError(p, e.what());
    }
}

void write_sequence(const fs::path& dir, const Sequence& seq, const SceneSpec& spec, const Scenario& scenario) {
    fs::create_directories(dir / "frames");
    fs::create_directories(dir / "masks");
    for (std::size_t k = 0; k < seq.frames.size(); ++k) {
        write_png(dir / "frames" / frame_file_name(k), seq.frames[k]);
        write_png(dir / "masks" / frame_file_name(k), seq.masks[k].to_image());
    }
    json labels = json::array();
    for (LevelState s : seq.labels) labels.push_back(std::string(to_string(s)));
    const json truth{{"levels", seq.levels},
                     {"labels", labels},
                     {"spec", spec_to_json(spec)},
                     {"scenario", scenario_to_json(scenario)}};
    write_text(dir / "truth.json", truth.dump(2) + "\n");
}

void write_manifest(const fs::path& root, const std::vector<std::string>& names) {
    fs::create_directories(root);
    write_text(root / "corpus.json", json{{"sequences", names}}.dump(2) + "\n");
}

std::vector<CorpusEntry> standard_corpus(std::size_t count, std::uint64_t first_seed) {
    std::vector<CorpusEntry> entries;
    entries.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        CorpusEntry e;
        const std::uint64_t seed = first_seed + i;
        char name[32];
        std::snprintf(name, sizeof name, "seq_%04zu", i);
        e.name = name;
        e.spec.seed = seed;
        e.scenario = standard_scenario(standard_kind(i), seed);
        entries.push_back(e);
    }
    return entries;
}

void write_corpus(const fs::path& root, const std::vector<CorpusEntry>& entries, int jobs) {
    fs::create_directories(root);
    detail::parallel_for(entries.size(), jobs, [&](std::size_t i) {
        const CorpusEntry& e = entries[i];
        write_sequence(root / e.name, render_sequence(e.spec, e.scenario), e.spec, e.scenario);
    });

    std::vector<std::string> names;
    names.reserve(entries.size());
    for (const auto& e : entries) names.push_back(e.name);
    write_manifest(root, names);
}

}  // namespace liqd
