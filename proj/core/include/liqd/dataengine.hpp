#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "liqd/imaging.hpp"
#include "liqd/level_state.hpp"
#include "liqd/morphology.hpp"

namespace liqd {

/// Per-pixel foreground probabilities in [0, 1].
class SaliencyMap {
public:
    SaliencyMap(int width, int height, double fill = 0.0);
    SaliencyMap(int width, int height, std::vector<double> probs);

    static SaliencyMap from_mask(const BinaryMask& mask);
    /// Gray level / 255; RGB input uses the first channel.
    static SaliencyMap from_image(const RasterImage& image);
    /// Rounded to 8-bit storage.
    RasterImage to_image() const;

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    double at(int x, int y) const noexcept { return probs_[static_cast<std::size_t>(y) * width_ + x]; }
    void set(int x, int y, double p);
    std::span<const double> probs() const noexcept { return probs_; }

    bool operator==(const SaliencyMap&) const = default;

private:
    int width_;
    int height_;
    std::vector<double> probs_;
};

inline constexpr double kBceEpsilon = 1e-7;

/// Pixel-averaged binary cross-entropy, -mean[g log p + (1 - g) log(1 - p)],
/// with p clipped to [1e-7, 1 - 1e-7]. Non-negative; lower is better.
double bce_loss(const SaliencyMap& prediction, const BinaryMask& truth);

struct LossWeights {
    std::vector<double> side_weights;
    double fuse_weight = 1.0;

    /// All-ones weights for `sides` side outputs.
    static LossWeights uniform(std::size_t sides);
};

/// sum_m w_side[m] * side_losses[m] + w_fuse * fuse_loss.
double fused_loss(std::span<const double> side_losses, double fuse_loss, const LossWeights& weights);

using ConfusionMatrix = std::array<std::array<std::size_t, kLevelStateCount>, kLevelStateCount>;

struct MetricsReport {
    double acc = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double mae = 0.0;
    double mse = 0.0;
};

struct ClassificationReport {
    double accuracy = 0.0;
    double precision = 0.0;  // macro
    double recall = 0.0;     // macro
    double f1 = 0.0;         // macro: mean of per-class F1
    ConfusionMatrix confusion{};  // rows: truth, columns: prediction
    std::array<double, kLevelStateCount> class_precision{};
    std::array<double, kLevelStateCount> class_recall{};
    std::array<double, kLevelStateCount> class_f1{};
    std::array<bool, kLevelStateCount> class_present{};
};

/// Accuracy plus macro precision/recall/F1 over the classes that occur in
/// either list. A class that is never predicted has precision 0.
ClassificationReport classification_metrics(std::span<const LevelState> predicted, std::span<const LevelState> truth);

struct RegressionErrors {
    double mae = 0.0;
    double mse = 0.0;
};

RegressionErrors regression_errors(std::span<const double> predicted, std::span<const double> truth);

/// Aligned table with columns Acc, P, R, F1-score, MAE, MSE.
std::string format_metrics_table(const MetricsReport& report, const std::string& row_label);

inline constexpr std::size_t kMaskFeatureCount = 5;

/// Quality descriptors of a candidate mask.
struct MaskQualityFeatures {
    double fill_ratio = 0.0;       // foreground / all pixels
    double component_count = 0.0;  // 8-connected
    double solidity = 0.0;         // foreground / bounding-box area
    double compactness = 0.0;      // perimeter^2 / area, perimeter = 4-boundary pixels
    double bce_vs_consensus = 0.0;

    std::array<double, kMaskFeatureCount> as_array() const noexcept {
        return {fill_ratio, component_count, solidity, compactness, bce_vs_consensus};
    }
};

/// Per-pixel mean of equally sized masks. Throws on an empty list or a size
/// mismatch.
SaliencyMap consensus_map(std::span<const BinaryMask> masks);

/// Empty masks report solidity 0 and compactness 0.
MaskQualityFeatures mask_features(const BinaryMask& mask, const SaliencyMap& consensus);

struct ScoredMask {
    BinaryMask mask;
    MaskQualityFeatures features;
    double score = 0.0;
    bool accepted = false;
};

struct FilterResult {
    std::vector<ScoredMask> accepted;
    std::vector<ScoredMask> rejected;
};

/// Stable partition by score >= tau; sets each mask's accepted flag.
FilterResult filter_masks(std::vector<ScoredMask> candidates, double tau);

/// Adds N(0, sigma^2) per channel from GaussianSampler(seed), rounds and clamps.
RasterImage augment_noise(const RasterImage& image, double sigma, std::uint64_t seed);

struct LabeledImage {
    RasterImage image;
    SaliencyMap map;
};

/// lambda * a + (1 - lambda) * b for both image (rounded) and map (real).
LabeledImage augment_mixup(const LabeledImage& a, const LabeledImage& b, double lambda);

/// Spearman rank correlation with average ranks for ties. 0 when either side
/// is constant.
double spearman_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace liqd
