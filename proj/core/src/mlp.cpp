#include "liqd/mlp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <stdexcept>
#include <string>

#include "liqd/random.hpp"

namespace liqd {
namespace {

constexpr std::uint16_t kFormatVersion = 1;
constexpr char kMagic[4] = {'L', 'I', 'Q', 'D'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
    std::array<std::uint8_t, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.insert(out.end(), bytes.begin(), bytes.end());
}

template <typename T>
T get_le(std::span<const std::uint8_t> in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw std::runtime_error("model file truncated");
    std::array<std::uint8_t, sizeof(T)> bytes{};
    std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(pos), sizeof(T), bytes.begin());
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    pos += sizeof(T);
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

struct Forward {
    std::vector<double> hidden_pre;
    std::vector<double> hidden;
    std::vector<double> probs;
};

Forward forward(const MlpModel& m, std::span<const double> x) {
    if (x.size() != m.input_size()) {
        throw std::invalid_argument("feature length " + std::to_string(x.size()) + " does not match model input " +
                                    std::to_string(m.input_size()));
    }
    Forward f;
    f.hidden_pre.resize(m.hidden_size());
    f.hidden.resize(m.hidden_size());
    for (std::size_t j = 0; j < m.hidden_size(); ++j) {
        const double* row = m.w1().data() + j * m.input_size();
        double acc = m.b1()[j];
        for (std::size_t i = 0; i < m.input_size(); ++i) acc += row[i] * x[i];
        f.hidden_pre[j] = acc;
        f.hidden[j] = acc > 0.0 ? acc : 0.0;
    }
    f.probs.resize(m.output_size());
    double peak = -INFINITY;
    for (std::size_t k = 0; k < m.output_size(); ++k) {
        const double* row = m.w2().data() + k * m.hidden_size();
        double acc = m.b2()[k];
        for (std::size_t j = 0; j < m.hidden_size(); ++j) acc += row[j] * f.hidden[j];
        f.probs[k] = acc;
        peak = std::max(peak, acc);
    }
    double total = 0.0;
    for (double& p : f.probs) {
        p = std::exp(p - peak);
        total += p;
    }
    for (double& p : f.probs) p /= total;
    return f;
}

}  // namespace

MlpModel::MlpModel(std::size_t input, std::size_t hidden, std::size_t output)
    : input_(input), hidden_(hidden), output_(output),
      w1_(input * hidden, 0.0), b1_(hidden, 0.0), w2_(hidden * output, 0.0), b2_(output, 0.0) {
    if (input == 0 || hidden == 0 || output == 0) throw std::invalid_argument("layer sizes must be positive");
}

MlpModel MlpModel::initialize(std::size_t input, std::size_t hidden, std::uint64_t seed, std::size_t output) {
    SplitMix64 rng(seed);
    return initialize(input, hidden, rng, output);
}

MlpModel MlpModel::initialize(std::size_t input, std::size_t hidden, SplitMix64& rng, std::size_t output) {
    MlpModel m(input, hidden, output);
    const double r1 = std::sqrt(6.0 / static_cast<double>(input + hidden));
    for (double& w : m.w1_) w = rng.uniform(-r1, r1);
    const double r2 = std::sqrt(6.0 / static_cast<double>(hidden + output));
    for (double& w : m.w2_) w = rng.uniform(-r2, r2);
    return m;
}

std::size_t MlpModel::parameter_count() const noexcept {
    return w1_.size() + b1_.size() + w2_.size() + b2_.size();
}

double& MlpModel::parameter(std::size_t i) {
    for (auto* block : {&w1_, &b1_, &w2_, &b2_}) {
        if (i < block->size()) return (*block)[i];
        i -= block->size();
    }
    throw std::out_of_range("parameter index out of range");
}

double MlpModel::parameter(std::size_t i) const { return const_cast<MlpModel*>(this)->parameter(i); }

std::vector<double> MlpModel::probabilities(std::span<const double> features) const {
    return forward(*this, features).probs;
}

void MlpModel::descend(std::span<const double> gradient, double step) {
    if (gradient.size() != parameter_count()) throw std::invalid_argument("gradient size mismatch");
    std::size_t offset = 0;
    for (auto* block : {&w1_, &b1_, &w2_, &b2_}) {
        for (double& v : *block) v -= step * gradient[offset++];
    }
}

bool MlpModel::all_finite() const noexcept {
    for (const auto* block : {&w1_, &b1_, &w2_, &b2_}) {
        for (double v : *block) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

std::vector<std::uint8_t> MlpModel::serialize() const {
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    put_le<std::uint16_t>(out, kFormatVersion);
    put_le<std::uint16_t>(out, 3);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(input_));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(hidden_));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(output_));
    out.reserve(out.size() + 8 * parameter_count());
    for (const auto* block : {&w1_, &b1_, &w2_, &b2_}) {
        for (double v : *block) put_le<double>(out, v);
    }
    return out;
}

MlpModel MlpModel::deserialize(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
        throw std::runtime_error("not a LIQD model file (bad magic)");
    }
    std::size_t pos = 4;
    const auto version = get_le<std::uint16_t>(bytes, pos);
    if (version != kFormatVersion) throw std::runtime_error("unsupported model version " + std::to_string(version));
    const auto layers = get_le<std::uint16_t>(bytes, pos);
    if (layers != 3) throw std::runtime_error("expected 3 layer sizes, found " + std::to_string(layers));
    const auto input = get_le<std::uint32_t>(bytes, pos);
    const auto hidden = get_le<std::uint32_t>(bytes, pos);
    const auto output = get_le<std::uint32_t>(bytes, pos);
    MlpModel m(input, hidden, output);
    if (bytes.size() - pos != 8 * m.parameter_count()) {
        throw std::runtime_error("model file size does not match its layer sizes");
    }
    for (auto* block : {&m.w1_, &m.b1_, &m.w2_, &m.b2_}) {
        for (double& v : *block) v = get_le<double>(bytes, pos);
    }
    return m;
}

void MlpModel::save(const std::filesystem::path& path) const {
    const auto bytes = serialize();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing model '" + path.string() + "'");
}

MlpModel MlpModel::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return deserialize(bytes);
    } catch (const std::exception& e) {
        throw std::runtime_error("'" + path.string() + "': " + e.what());
    }
}

double cross_entropy(const MlpModel& model, std::span<const double> features, LevelState label,
                     std::vector<double>* gradient) {
    const std::size_t target = index_of(label);
    if (target >= model.output_size()) throw std::invalid_argument("label outside model output range");
    const Forward f = forward(model, features);
    const double loss = -std::log(std::max(f.probs[target], 1e-300));
    if (!gradient) return loss;
    if (gradient->size() != model.parameter_count()) gradient->assign(model.parameter_count(), 0.0);

    const std::size_t in = model.input_size();
    const std::size_t hid = model.hidden_size();
    const std::size_t out = model.output_size();
    double* g_w1 = gradient->data();
    double* g_b1 = g_w1 + in * hid;
    double* g_w2 = g_b1 + hid;
    double* g_b2 = g_w2 + hid * out;

    std::vector<double> d_hidden(hid, 0.0);
    for (std::size_t k = 0; k < out; ++k) {
        const double d_logit = f.probs[k] - (k == target ? 1.0 : 0.0);
        g_b2[k] += d_logit;
        const double* row = model.w2().data() + k * hid;
        double* g_row = g_w2 + k * hid;
        for (std::size_t j = 0; j < hid; ++j) {
            g_row[j] += d_logit * f.hidden[j];
            d_hidden[j] += d_logit * row[j];
        }
    }
    for (std::size_t j = 0; j < hid; ++j) {
        if (f.hidden_pre[j] <= 0.0) continue;
        const double d = d_hidden[j];
        g_b1[j] += d;
        double* g_row = g_w1 + j * in;
        for (std::size_t i = 0; i < in; ++i) g_row[i] += d * features[i];
    }
    return loss;
}

Prediction predict(const MlpModel& model, std::span<const double> features) {
    if (model.output_size() != kLevelStateCount) throw std::invalid_argument("model must have 5 outputs");
    const auto probs = model.probabilities(features);
    Prediction p;
    std::size_t best = 0;
    for (std::size_t k = 0; k < kLevelStateCount; ++k) {
        p.probabilities[k] = probs[k];
        if (probs[k] > probs[best]) best = k;
    }
    p.label = static_cast<LevelState>(best);
    p.confidence = probs[best];
    return p;
}

double mean_loss(const MlpModel& model, std::span<const TrainingExample> dataset) {
    if (dataset.empty()) return 0.0;
    double total = 0.0;
    for (const auto& ex : dataset) total += cross_entropy(model, ex.features, ex.label);
    return total / static_cast<double>(dataset.size());
}

TrainResult train(std::span<const TrainingExample> dataset, const TrainOptions& options) {
    if (dataset.empty()) throw std::invalid_argument("training set is empty");
    if (options.batch_size == 0) throw std::invalid_argument("batch size must be positive");
    const std::size_t input = dataset.front().features.size();
    std::array<bool, kLevelStateCount> present{};
    for (const auto& ex : dataset) {
        if (ex.features.size() != input) throw std::invalid_argument("training examples differ in feature length");
        present[index_of(ex.label)] = true;
    }
    std::string missing;
    for (LevelState s : kAllLevelStates) {
        if (present[index_of(s)]) continue;
        if (!missing.empty()) missing += ", ";
        missing += to_string(s);
    }
    if (!missing.empty()) throw std::invalid_argument("training set is missing classes: " + missing);

    // Initialization and shuffling share one stream.
    SplitMix64 rng(options.seed);
    MlpModel model = MlpModel::initialize(input, options.hidden, rng);

    TrainResult result{model, {}};
    result.loss_trace.push_back(mean_loss(model, dataset));

    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> grad(model.parameter_count());
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng.below(i)]);
        }
        for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
            const std::size_t stop = std::min(order.size(), start + options.batch_size);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t b = start; b < stop; ++b) {
                const auto& ex = dataset[order[b]];
                cross_entropy(model, ex.features, ex.label, &grad);
            }
            const double step = options.learn_rate / static_cast<double>(stop - start);
            model.descend(grad, step);
        }
        result.loss_trace.push_back(mean_loss(model, dataset));
    }
    result.model = std::move(model);
    return result;
}

}  // namespace liqd
