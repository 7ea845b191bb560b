#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "liqd/dataengine.hpp"

namespace liqd {

/// Linear reward model predicting a mask's IoU from its quality features.
struct LinearScorer {
    std::array<double, kMaskFeatureCount> weights{};
    double bias = 0.0;
    double tau = 0.7;

    /// w . features + bias, clamped to [0, 1].
    double score(const MaskQualityFeatures& features) const noexcept;

    /// {"weights": [...], "bias": b, "tau": t}
    std::string to_json() const;
    static LinearScorer from_json(const std::string& text);
    void save(const std::filesystem::path& path) const;
    static LinearScorer load(const std::filesystem::path& path);
};

struct ScorerExample {
    MaskQualityFeatures features;
    double iou = 0.0;
};

inline constexpr double kScorerRidge = 1e-6;

/// Ridge least squares on standardized features (the intercept is not
/// penalized), mapped back to raw-feature weights. Needs at least 6 examples.
LinearScorer fit_scorer(std::span<const ScorerExample> seed_set, double ridge = kScorerRidge);

/// Scores every candidate and partitions at scorer.tau.
FilterResult score_and_filter(const LinearScorer& scorer, std::vector<BinaryMask> masks, const SaliencyMap& consensus);

}  // namespace liqd
