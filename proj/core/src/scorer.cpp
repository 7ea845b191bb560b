#include "liqd/scorer.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace liqd {

double LinearScorer::score(const MaskQualityFeatures& features) const noexcept {
    const auto f = features.as_array();
    double s = bias;
    for (std::size_t k = 0; k < kMaskFeatureCount; ++k) s += weights[k] * f[k];
    return std::clamp(s, 0.0, 1.0);
}

std::string LinearScorer::to_json() const {
    nlohmann::json j;
    j["weights"] = weights;
    j["bias"] = bias;
    j["tau"] = tau;
    return j.dump(2);
}

LinearScorer LinearScorer::from_json(const std::string& text) {
    LinearScorer s;
    try {
        const auto j = nlohmann::json::parse(text);
        const auto& w = j.at("weights");
        if (!w.is_array() || w.size() != kMaskFeatureCount) {
            throw std::invalid_argument("scorer JSON must hold exactly 5 weights");
        }
        for (std::size_t k = 0; k < kMaskFeatureCount; ++k) s.weights[k] = w[k].get<double>();
        s.bias = j.at("bias").get<double>();
        s.tau = j.value("tau", 0.7);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed scorer JSON: ") + e.what());
    }
    return s;
}

void LinearScorer::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scorer '" + path.string() + "'");
    out << to_json() << '\n';
}

LinearScorer LinearScorer::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scorer '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return from_json(buffer.str());
    } catch (const std::exception& e) {
        throw std::runtime_error("'" + path.string() + "': " + e.what());
    }
}

LinearScorer fit_scorer(std::span<const ScorerExample> seed_set, double ridge) {
    constexpr std::size_t kMinExamples = 6;
    if (seed_set.size() < kMinExamples) {
        throw std::invalid_argument("fit_scorer needs at least 6 examples, got " + std::to_string(seed_set.size()));
    }
    const auto n = static_cast<Eigen::Index>(seed_set.size());
    constexpr auto d = static_cast<Eigen::Index>(kMaskFeatureCount);
    Eigen::MatrixXd x(n, d);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto f = seed_set[static_cast<std::size_t>(i)].features.as_array();
        for (Eigen::Index k = 0; k < d; ++k) x(i, k) = f[static_cast<std::size_t>(k)];
        y(i) = seed_set[static_cast<std::size_t>(i)].iou;
    }

    const Eigen::RowVectorXd mean = x.colwise().mean();
    Eigen::MatrixXd z = x.rowwise() - mean;
    Eigen::VectorXd scale = (z.colwise().squaredNorm() / static_cast<double>(n)).cwiseSqrt().transpose();
    for (Eigen::Index k = 0; k < d; ++k) {
        // A constant feature carries no signal; its column is zeroed.
        if (scale(k) > 0.0) z.col(k) /= scale(k);
        else z.col(k).setZero();
    }
    const double y_mean = y.mean();
    const Eigen::VectorXd yc = y.array() - y_mean;

    Eigen::MatrixXd gram = z.transpose() * z;
    gram.diagonal().array() += ridge;
    const Eigen::VectorXd beta = gram.ldlt().solve(z.transpose() * yc);

    LinearScorer s;
    s.bias = y_mean;
    for (Eigen::Index k = 0; k < d; ++k) {
        const double w = scale(k) > 0.0 ? beta(k) / scale(k) : 0.0;
        s.weights[static_cast<std::size_t>(k)] = w;
        s.bias -= w * mean(k);
    }
    return s;
}

FilterResult score_and_filter(const LinearScorer& scorer, std::vector<BinaryMask> masks, const SaliencyMap& consensus) {
    std::vector<ScoredMask> scored;
    scored.reserve(masks.size());
    for (auto& m : masks) {
        ScoredMask s{std::move(m), {}, 0.0, false};
        s.features = mask_features(s.mask, consensus);
        s.score = scorer.score(s.features);
        scored.push_back(std::move(s));
    }
    return filter_masks(std::move(scored), scorer.tau);
}

}  // namespace liqd
