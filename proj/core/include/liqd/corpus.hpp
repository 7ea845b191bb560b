#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "liqd/imaging.hpp"
#include "liqd/level_state.hpp"
#include "liqd/morphology.hpp"
#include "liqd/synth.hpp"

namespace liqd {

/// Missing or malformed corpus content. path() names the offending file.
class CorpusError : public std::runtime_error {
public:
    CorpusError(const std::filesystem::path& path, const std::string& what);
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

struct SequenceTruth {
    std::vector<double> levels;
    std::vector<LevelState> labels;
    std::optional<SceneSpec> spec;
    std::optional<Scenario> scenario;
};

/// One sequence directory: frames/NNNN.png, masks/NNNN.png, optional truth.json.
struct CorpusSequence {
    std::string name;
    std::filesystem::path dir;
    std::size_t frame_count = 0;
    std::optional<SequenceTruth> truth;

    std::filesystem::path frame_path(std::size_t k) const;
    std::filesystem::path mask_path(std::size_t k) const;
};

struct Corpus {
    std::filesystem::path root;
    std::vector<CorpusSequence> sequences;
};

/// Reads corpus.json when present; a directory without one is treated as a
/// single sequence. Throws CorpusError when nothing usable is found, when a
/// sequence has fewer than two frames, or when require_truth is set and a
/// truth.json is missing.
Corpus open_corpus(const std::filesystem::path& root, bool require_truth = false);

RasterImage load_frame(const CorpusSequence& seq, std::size_t k);
BinaryMask load_mask(const CorpusSequence& seq, std::size_t k);

/// Writes frames, masks and truth.json for one rendered sequence.
void write_sequence(const std::filesystem::path& dir, const Sequence& seq, const SceneSpec& spec,
                    const Scenario& scenario);

/// Writes corpus.json listing `names` (directories relative to root).
void write_manifest(const std::filesystem::path& root, const std::vector<std::string>& names);

struct CorpusEntry {
    std::string name;
    SceneSpec spec;
    Scenario scenario;
};

/// Entry i uses the default scene with seed first_seed + i and the standard
/// scenario for kind i % 5.
std::vector<CorpusEntry> standard_corpus(std::size_t count, std::uint64_t first_seed = 0);

/// Renders and writes every entry plus the manifest, spread over `jobs` threads.
void write_corpus(const std::filesystem::path& root, const std::vector<CorpusEntry>& entries, int jobs = 1);

std::string frame_file_name(std::size_t k);

}  // namespace liqd
