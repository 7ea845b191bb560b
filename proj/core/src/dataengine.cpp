#include "liqd/dataengine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>

#include "liqd/random.hpp"

namespace liqd {

SaliencyMap::SaliencyMap(int width, int height, double fill) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw std::invalid_argument("saliency map dimensions must be >= 1");
    if (!(fill >= 0.0 && fill <= 1.0)) throw std::invalid_argument("saliency values must lie in [0, 1]");
    probs_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

SaliencyMap::SaliencyMap(int width, int height, std::vector<double> probs) : SaliencyMap(width, height) {
    if (probs.size() != probs_.size()) throw std::invalid_argument("saliency data length mismatch");
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("saliency values must lie in [0, 1]");
    }
    probs_ = std::move(probs);
}

SaliencyMap SaliencyMap::from_mask(const BinaryMask& mask) {
    SaliencyMap out(mask.width(), mask.height());
    auto bits = mask.bits();
    for (std::size_t i = 0; i < bits.size(); ++i) out.probs_[i] = bits[i] ? 1.0 : 0.0;
    return out;
}

SaliencyMap SaliencyMap::from_image(const RasterImage& image) {
    SaliencyMap out(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            out.probs_[static_cast<std::size_t>(y) * out.width_ + x] = image.at(x, y, 0) / 255.0;
        }
    }
    return out;
}

RasterImage SaliencyMap::to_image() const {
    RasterImage out(width_, height_, 1);
    auto data = out.data();
    for (std::size_t i = 0; i < probs_.size(); ++i) data[i] = round_to_u8(probs_[i] * 255.0);
    return out;
}

void SaliencyMap::set(int x, int y, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("saliency values must lie in [0, 1]");
    probs_[static_cast<std::size_t>(y) * width_ + x] = p;
}

double bce_loss(const SaliencyMap& prediction, const BinaryMask& truth) {
    if (prediction.width() != truth.width() || prediction.height() != truth.height()) {
        throw std::invalid_argument("bce_loss: prediction and truth differ in size");
    }
    auto probs = prediction.probs();
    auto bits = truth.bits();
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double p = std::clamp(probs[i], kBceEpsilon, 1.0 - kBceEpsilon);
        total += bits[i] ? std::log(p) : std::log(1.0 - p);
    }
    return -total / static_cast<double>(probs.size());
}

LossWeights LossWeights::uniform(std::size_t sides) { return LossWeights{std::vector<double>(sides, 1.0), 1.0}; }

double fused_loss(std::span<const double> side_losses, double fuse_loss, const LossWeights& weights) {
    if (weights.side_weights.empty()) throw std::invalid_argument("at least one side output is required");
    if (side_losses.size() != weights.side_weights.size()) {
        throw std::invalid_argument("fused_loss: " + std::to_string(side_losses.size()) + " side losses for " +
                                    std::to_string(weights.side_weights.size()) + " weights");
    }
    double total = 0.0;
    for (std::size_t m = 0; m < side_losses.size(); ++m) {
        if (weights.side_weights[m] < 0.0) throw std::invalid_argument("loss weights must be non-negative");
        total += weights.side_weights[m] * side_losses[m];
    }
    if (weights.fuse_weight < 0.0) throw std::invalid_argument("loss weights must be non-negative");
    return total + weights.fuse_weight * fuse_loss;
}

ClassificationReport classification_metrics(std::span<const LevelState> predicted, std::span<const LevelState> truth) {
    if (predicted.size() != truth.size()) {
        throw std::invalid_argument("classification_metrics: " + std::to_string(predicted.size()) +
                                    " predictions for " + std::to_string(truth.size()) + " labels");
    }
    if (truth.empty()) throw std::invalid_argument("classification_metrics: empty label lists");

    ClassificationReport r;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++r.confusion[index_of(truth[i])][index_of(predicted[i])];
        correct += predicted[i] == truth[i] ? 1 : 0;
    }
    r.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());

    std::size_t classes = 0;
    for (std::size_t c = 0; c < kLevelStateCount; ++c) {
        std::size_t predicted_c = 0;
        std::size_t actual_c = 0;
        for (std::size_t k = 0; k < kLevelStateCount; ++k) {
            predicted_c += r.confusion[k][c];
            actual_c += r.confusion[c][k];
        }
        if (predicted_c == 0 && actual_c == 0) continue;
        const double tp = static_cast<double>(r.confusion[c][c]);
        const double p = predicted_c ? tp / static_cast<double>(predicted_c) : 0.0;
        const double rc = actual_c ? tp / static_cast<double>(actual_c) : 0.0;
        r.class_present[c] = true;
        r.class_precision[c] = p;
        r.class_recall[c] = rc;
        r.class_f1[c] = p + rc > 0.0 ? 2.0 * p * rc / (p + rc) : 0.0;
        r.precision += p;
        r.recall += rc;
        r.f1 += r.class_f1[c];
        ++classes;
    }
    r.precision /= static_cast<double>(classes);
    r.recall /= static_cast<double>(classes);
    r.f1 /= static_cast<double>(classes);
    return r;
}

RegressionErrors regression_errors(std::span<const double> predicted, std::span<const double> truth) {
    if (predicted.size() != truth.size()) throw std::invalid_argument("regression_errors: length mismatch");
    if (truth.empty()) throw std::invalid_argument("regression_errors: empty lists");
    RegressionErrors e;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double d = predicted[i] - truth[i];
        e.mae += std::abs(d);
        e.mse += d * d;
    }
    e.mae /= static_cast<double>(truth.size());
    e.mse /= static_cast<double>(truth.size());
    return e;
}

std::string format_metrics_table(const MetricsReport& report, const std::string& row_label) {
    const int label_width = static_cast<int>(std::max<std::size_t>(row_label.size(), 5));
    char line[256];
    std::string out;
    std::snprintf(line, sizeof line, "%-*s  %7s %7s %7s %9s %9s %9s\n", label_width, "Model", "Acc", "P", "R",
                  "F1-score", "MAE", "MSE");
    out += line;
    std::snprintf(line, sizeof line, "%-*s  %7.3f %7.3f %7.3f %9.3f %9.3f %9.3f\n", label_width, row_label.c_str(),
                  report.acc, report.precision, report.recall, report.f1, report.mae, report.mse);
    out += line;
    return out;
}

SaliencyMap consensus_map(std::span<const BinaryMask> masks) {
    if (masks.empty()) throw std::invalid_argument("consensus needs at least one mask");
    const int w = masks.front().width();
    const int h = masks.front().height();
    std::vector<double> sum(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0);
    for (const auto& m : masks) {
        if (m.width() != w || m.height() != h) throw std::invalid_argument("consensus masks differ in size");
        auto bits = m.bits();
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += bits[i];
    }
    for (double& v : sum) v /= static_cast<double>(masks.size());
    return SaliencyMap(w, h, std::move(sum));
}

MaskQualityFeatures mask_features(const BinaryMask& mask, const SaliencyMap& consensus) {
    if (mask.width() != consensus.width() || mask.height() != consensus.height()) {
        throw std::invalid_argument("mask_features: mask and consensus differ in size");
    }
    MaskQualityFeatures f;
    const std::size_t area = mask.count();
    f.fill_ratio = static_cast<double>(area) / static_cast<double>(mask.size());
    f.bce_vs_consensus = bce_loss(consensus, mask);
    if (area == 0) return f;
    f.component_count = static_cast<double>(count_components(mask));
    const BoundingBox box = bounding_box(mask);
    f.solidity = static_cast<double>(area) / (static_cast<double>(box.width()) * box.height());
    const double perimeter = static_cast<double>(inner_boundary(mask).count());
    f.compactness = perimeter * perimeter / static_cast<double>(area);
    return f;
}

FilterResult filter_masks(std::vector<ScoredMask> candidates, double tau) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be a finite value >= 0");
    FilterResult out;
    for (auto& c : candidates) {
        c.accepted = c.score >= tau;
        (c.accepted ? out.accepted : out.rejected).push_back(std::move(c));
    }
    return out;
}

RasterImage augment_noise(const RasterImage& image, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
    RasterImage out = image;
    if (sigma == 0.0) return out;
    GaussianSampler gauss(seed);
    for (auto& v : out.data()) v = round_to_u8(static_cast<double>(v) + sigma * gauss.next());
    return out;
}

LabeledImage augment_mixup(const LabeledImage& a, const LabeledImage& b, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("mixup lambda must be in [0, 1]");
    if (!a.image.same_shape(b.image) || a.image.channels() != b.image.channels() ||
        a.map.width() != b.map.width() || a.map.height() != b.map.height() ||
        a.map.width() != a.image.width() || a.map.height() != a.image.height()) {
        throw std::invalid_argument("augment_mixup: inputs differ in size");
    }
    RasterImage image = a.image;
    auto da = a.image.data();
    auto db = b.image.data();
    auto out = image.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = round_to_u8(lambda * da[i] + (1.0 - lambda) * db[i]);
    }
    std::vector<double> probs(a.map.probs().size());
    auto pa = a.map.probs();
    auto pb = b.map.probs();
    for (std::size_t i = 0; i < probs.size(); ++i) {
        probs[i] = std::clamp(lambda * pa[i] + (1.0 - lambda) * pb[i], 0.0, 1.0);
    }
    return LabeledImage{std::move(image), SaliencyMap(a.map.width(), a.map.height(), std::move(probs))};
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("spearman_correlation: length mismatch");
    if (a.size() < 2) return 0.0;
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

}  // namespace liqd
