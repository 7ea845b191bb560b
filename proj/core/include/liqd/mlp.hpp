#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "liqd/level_state.hpp"
#include "liqd/random.hpp"

namespace liqd {

/// Two-layer perceptron: input -> hidden (ReLU) -> kLevelStateCount (softmax).
/// Weights are row-major, one row per output unit.
class MlpModel {
public:
    static constexpr std::size_t kDefaultHidden = 32;

    /// All-zero parameters.
    MlpModel(std::size_t input, std::size_t hidden, std::size_t output = kLevelStateCount);

    /// Uniform Glorot initialization, r = sqrt(6 / (fan_in + fan_out)), drawn
    /// from SplitMix64(seed) in the order w1, w2. Biases start at zero.
    static MlpModel initialize(std::size_t input, std::size_t hidden, std::uint64_t seed,
                               std::size_t output = kLevelStateCount);
    /// Same, continuing an existing stream.
    static MlpModel initialize(std::size_t input, std::size_t hidden, SplitMix64& rng,
                               std::size_t output = kLevelStateCount);

    std::size_t input_size() const noexcept { return input_; }
    std::size_t hidden_size() const noexcept { return hidden_; }
    std::size_t output_size() const noexcept { return output_; }
    std::size_t parameter_count() const noexcept;

    std::vector<double>& w1() noexcept { return w1_; }
    std::vector<double>& b1() noexcept { return b1_; }
    std::vector<double>& w2() noexcept { return w2_; }
    std::vector<double>& b2() noexcept { return b2_; }
    const std::vector<double>& w1() const noexcept { return w1_; }
    const std::vector<double>& b1() const noexcept { return b1_; }
    const std::vector<double>& w2() const noexcept { return w2_; }
    const std::vector<double>& b2() const noexcept { return b2_; }

    /// Flat view order used by serialization and gradient checks: w1, b1, w2, b2.
    double& parameter(std::size_t i);
    double parameter(std::size_t i) const;

    /// Softmax output. Throws std::invalid_argument on an input length mismatch.
    std::vector<double> probabilities(std::span<const double> features) const;

    bool all_finite() const noexcept;

    /// parameters -= step * gradient, gradient in flat parameter order.
    void descend(std::span<const double> gradient, double step);

    /// Binary layout: "LIQD", u16 version, u16 layer count, u32 layer sizes,
    /// then little-endian f64 values in the order w1, b1, w2, b2.
    std::vector<std::uint8_t> serialize() const;
    static MlpModel deserialize(std::span<const std::uint8_t> bytes);
    void save(const std::filesystem::path& path) const;
    static MlpModel load(const std::filesystem::path& path);

    bool operator==(const MlpModel&) const = default;

private:
    std::size_t input_;
    std::size_t hidden_;
    std::size_t output_;
    std::vector<double> w1_;
    std::vector<double> b1_;
    std::vector<double> w2_;
    std::vector<double> b2_;
};

/// Cross-entropy of one example. When gradient is non-null, the parameter
/// gradient (flat order of MlpModel::parameter) is accumulated into it.
double cross_entropy(const MlpModel& model, std::span<const double> features, LevelState label,
                     std::vector<double>* gradient = nullptr);

struct Prediction {
    LevelState label = LevelState::LowStatic;
    double confidence = 0.0;
    std::array<double, kLevelStateCount> probabilities{};
};

/// Argmax of the softmax; ties go to the lowest enumeration index.
Prediction predict(const MlpModel& model, std::span<const double> features);

struct TrainingExample {
    std::vector<double> features;
    LevelState label = LevelState::LowStatic;
};

struct TrainOptions {
    double learn_rate = 0.05;
    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    std::size_t hidden = MlpModel::kDefaultHidden;
    std::uint64_t seed = 0;
};

struct TrainResult {
    MlpModel model;
    /// Mean training loss before the first epoch, then after each epoch.
    std::vector<double> loss_trace;
};

/// Mini-batch SGD on mean cross-entropy. One SplitMix64(seed) stream drives
/// initialization and then the per-epoch Fisher-Yates shuffles, so equal
/// inputs give bit-identical models. Throws std::invalid_argument when the
/// dataset is empty, lengths differ, or a class is missing (the message lists
/// the absent labels).
TrainResult train(std::span<const TrainingExample> dataset, const TrainOptions& options = {});

double mean_loss(const MlpModel& model, std::span<const TrainingExample> dataset);

}  // namespace liqd
