#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "liqd/dataengine.hpp"
#include "liqd/random.hpp"
#include "liqd/scorer.hpp"
#include "liqd/synth.hpp"
#include "oracles.hpp"

namespace liqd {
namespace {

constexpr double kLn2 = 0.6931471805599453;

BinaryMask square_at(int w, int h, int x0, int y0, int side) {
    BinaryMask m(w, h);
    for (int y = y0; y < y0 + side; ++y)
        for (int x = x0; x < x0 + side; ++x) m.set(x, y);
    return m;
}

TEST(Bce, HalfProbabilityIsLn2) {
    EXPECT_NEAR(bce_loss(SaliencyMap(1, 1, 0.5), BinaryMask(1, 1, true)), kLn2, 1e-12);
    SplitMix64 rng(1);
    EXPECT_NEAR(bce_loss(SaliencyMap(9, 7, 0.5), oracle::random_mask(9, 7, 0.5, rng)), kLn2, 1e-12);
}

TEST(Bce, PerfectPredictionNearZero) {
    SplitMix64 rng(2);
    const BinaryMask m = oracle::random_mask(12, 12, 0.4, rng);
    EXPECT_LE(bce_loss(SaliencyMap::from_mask(m), m), 1e-6);
    EXPECT_GE(bce_loss(SaliencyMap::from_mask(m), m), 0.0);
}

TEST(Bce, ImprovesTowardTruth) {
    const BinaryMask fg(1, 1, true);
    double last = INFINITY;
    for (double p = 0.05; p < 1.0; p += 0.05) {
        const double l = bce_loss(SaliencyMap(1, 1, p), fg);
        EXPECT_LT(l, last);
        last = l;
    }
}

TEST(Bce, SizeMismatch) {
    EXPECT_THROW(bce_loss(SaliencyMap(2, 2), BinaryMask(2, 3)), std::invalid_argument);
    EXPECT_THROW(SaliencyMap(2, 2, 1.5), std::invalid_argument);
}

TEST(FusedLoss, Examples) {
    const std::vector<double> sides{0.2, 0.3};
    EXPECT_EQ(fused_loss(sides, 0.1, LossWeights::uniform(2)), 0.2 + 0.3 + 0.1);
    EXPECT_EQ(fused_loss(sides, 0.1, LossWeights{{0.0, 0.0}, 0.0}), 0.0);
    const std::vector<double> l{0.4, 0.2};
    EXPECT_EQ(fused_loss(l, 0.3, LossWeights{{2.0, 0.5}, 1.0}), 2.0 * 0.4 + 0.5 * 0.2 + 1.0 * 0.3);
    EXPECT_NEAR(fused_loss(l, 0.3, LossWeights{{2.0, 0.5}, 1.0}), 1.2, 1e-15);
    EXPECT_THROW(fused_loss(l, 0.3, LossWeights::uniform(3)), std::invalid_argument);
    EXPECT_THROW(fused_loss(l, 0.3, LossWeights{{-1.0, 1.0}, 1.0}), std::invalid_argument);
}

TEST(FusedLoss, LinearInFuseWeight) {
    const std::vector<double> l{0.25, 0.5, 0.125};
    const double base = fused_loss(l, 0.75, LossWeights{{1, 1, 1}, 0.0});
    EXPECT_EQ(fused_loss(l, 0.75, LossWeights{{1, 1, 1}, 4.0}) - base, 4.0 * 0.75);
}

TEST(ClassificationMetrics, ToyExample) {
    using S = LevelState;
    const std::vector<S> truth{S::LowStatic, S::LowStatic, S::Rising, S::Rising};
    const std::vector<S> pred{S::LowStatic, S::Rising, S::Rising, S::Rising};
    const ClassificationReport r = classification_metrics(pred, truth);
    EXPECT_DOUBLE_EQ(r.accuracy, 0.75);
    EXPECT_DOUBLE_EQ(r.class_precision[0], 1.0);
    EXPECT_DOUBLE_EQ(r.class_recall[0], 0.5);
    EXPECT_DOUBLE_EQ(r.class_precision[1], 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(r.class_recall[1], 1.0);
    EXPECT_NEAR(r.f1, (2.0 / 3.0 + 4.0 / 5.0) / 2.0, 1e-15);
    EXPECT_FALSE(r.class_present[2]);
    EXPECT_EQ(r.confusion[0][1], 1u);
}

TEST(ClassificationMetrics, PerfectAndConstant) {
    std::vector<LevelState> truth;
    for (int i = 0; i < 10; ++i)
        for (LevelState s : kAllLevelStates) truth.push_back(s);
    const auto perfect = classification_metrics(truth, truth);
    EXPECT_EQ(perfect.accuracy, 1.0);
    EXPECT_EQ(perfect.f1, 1.0);
    const std::vector<LevelState> constant(truth.size(), LevelState::HighStatic);
    EXPECT_DOUBLE_EQ(classification_metrics(constant, truth).accuracy, 0.2);
    EXPECT_THROW(classification_metrics(constant, std::vector<LevelState>(3)), std::invalid_argument);
    EXPECT_THROW(classification_metrics({}, {}), std::invalid_argument);
}

TEST(ClassificationMetrics, MatchesOracle) {
    SplitMix64 rng(3);
    for (int i = 0; i < 50; ++i) {
        std::vector<LevelState> a, b;
        const int n = rng.range(1, 60);
        for (int k = 0; k < n; ++k) {
            a.push_back(kAllLevelStates[rng.below(5)]);
            b.push_back(kAllLevelStates[rng.below(5)]);
        }
        const auto r = classification_metrics(a, b);
        const auto o = oracle::classification(a, b);
        EXPECT_EQ(r.accuracy, o.accuracy);
        EXPECT_EQ(r.precision, o.precision);
        EXPECT_EQ(r.recall, o.recall);
        EXPECT_EQ(r.f1, o.f1);
        EXPECT_EQ(r.confusion, o.confusion);
    }
}

TEST(RegressionErrors, Examples) {
    const auto e = regression_errors(std::vector<double>{1, 3}, std::vector<double>{2, 1});
    EXPECT_EQ(e.mae, 1.5);
    EXPECT_EQ(e.mse, 2.5);
    const auto z = regression_errors(std::vector<double>{4, 5}, std::vector<double>{4, 5});
    EXPECT_EQ(z.mae, 0.0);
    const auto c = regression_errors(std::vector<double>{3.5, 7.5}, std::vector<double>{1, 5});
    EXPECT_EQ(c.mae, 2.5);
    EXPECT_EQ(c.mse, 6.25);
    EXPECT_THROW(regression_errors(std::vector<double>{1}, std::vector<double>{}), std::invalid_argument);
}

TEST(MetricsTable, ColumnOrder) {
    const std::string t = format_metrics_table({0.9, 0.8, 0.7, 0.75, 1.5, 2.5}, "x");
    const auto pos = [&](const char* s) { return t.find(s); };
    EXPECT_LT(pos("Acc"), pos(" P "));
    EXPECT_LT(pos(" P "), pos(" R "));
    EXPECT_LT(pos(" R "), pos("F1-score"));
    EXPECT_LT(pos("F1-score"), pos("MAE"));
    EXPECT_LT(pos("MAE"), pos("MSE"));
}

TEST(MaskFeatures, Basics) {
    const SaliencyMap consensus(10, 10, 0.5);
    const auto full = mask_features(BinaryMask(10, 10, true), consensus);
    EXPECT_EQ(full.fill_ratio, 1.0);
    EXPECT_EQ(full.component_count, 1.0);
    EXPECT_EQ(full.solidity, 1.0);
    const auto two = mask_features(square_at(10, 10, 0, 0, 3) | square_at(10, 10, 6, 6, 3), consensus);
    EXPECT_EQ(two.component_count, 2.0);
    const auto empty = mask_features(BinaryMask(10, 10), consensus);
    EXPECT_EQ(empty.fill_ratio, 0.0);
    EXPECT_EQ(empty.solidity, 0.0);
    EXPECT_EQ(empty.compactness, 0.0);
    // 3x3 square: 8 boundary pixels, area 9.
    EXPECT_DOUBLE_EQ(mask_features(square_at(10, 10, 2, 2, 3), consensus).compactness, 64.0 / 9.0);
}

TEST(Scorer, RecoversLinearTarget) {
    SplitMix64 rng(4);
    std::vector<ScorerExample> seed;
    std::vector<BinaryMask> masks;
    for (int i = 0; i < 30; ++i) masks.push_back(oracle::random_mask(16, 16, rng.uniform(0.05, 0.95), rng));
    const SaliencyMap consensus = consensus_map(masks);
    for (const auto& m : masks) {
        const auto f = mask_features(m, consensus);
        seed.push_back({f, f.fill_ratio});
    }
    const LinearScorer exact = fit_scorer(seed, 1e-12);
    for (const auto& e : seed) EXPECT_NEAR(exact.score(e.features), e.iou, 1e-6);
    // The default ridge only shrinks slightly.
    const LinearScorer shrunk = fit_scorer(seed);
    for (const auto& e : seed) EXPECT_NEAR(shrunk.score(e.features), e.iou, 1e-4);
}

TEST(Scorer, ConstantTarget) {
    SplitMix64 rng(5);
    std::vector<ScorerExample> seed;
    const SaliencyMap consensus(8, 8, 0.5);
    for (int i = 0; i < 10; ++i) seed.push_back({mask_features(oracle::random_mask(8, 8, 0.5, rng), consensus), 0.42});
    const LinearScorer s = fit_scorer(seed);
    for (const auto& e : seed) EXPECT_NEAR(s.score(e.features), 0.42, 1e-9);
    EXPECT_THROW(fit_scorer(std::span<const ScorerExample>(seed.data(), 5)), std::invalid_argument);
}

TEST(Scorer, JsonRoundTrip) {
    LinearScorer s;
    s.weights = {0.1, -0.2, 0.3, -0.4, 0.5};
    s.bias = 0.25;
    s.tau = 0.6;
    const LinearScorer t = LinearScorer::from_json(s.to_json());
    EXPECT_EQ(t.weights, s.weights);
    EXPECT_EQ(t.bias, s.bias);
    EXPECT_EQ(t.tau, s.tau);
    EXPECT_THROW(LinearScorer::from_json("{\"bias\": 1}"), std::invalid_argument);
}

std::vector<ScoredMask> scored(std::initializer_list<double> scores) {
    std::vector<ScoredMask> out;
    int i = 0;
    for (double s : scores) {
        BinaryMask m(4, 4);
        m.set(i % 4, i / 4);
        out.push_back({m, {}, s, false});
        ++i;
    }
    return out;
}

TEST(FilterMasks, Examples) {
    auto r = filter_masks(scored({0.9, 0.5}), 0.7);
    ASSERT_EQ(r.accepted.size(), 1u);
    EXPECT_EQ(r.accepted[0].score, 0.9);
    EXPECT_TRUE(r.accepted[0].accepted);
    EXPECT_FALSE(r.rejected[0].accepted);
    EXPECT_EQ(filter_masks(scored({0.0, 0.3, 1.0}), 0.0).accepted.size(), 3u);
    EXPECT_EQ(filter_masks(scored({0.0, 0.3, 1.0}), 1.0 + 1e-9).accepted.size(), 0u);
    EXPECT_THROW(filter_masks(scored({0.5}), -0.1), std::invalid_argument);
}

TEST(FilterMasks, StablePartition) {
    SplitMix64 rng(6);
    std::vector<ScoredMask> in;
    for (int i = 0; i < 16; ++i) in.push_back(scored({rng.uniform()})[0]), in.back().mask.set(i % 4, i / 4);
    const auto r = filter_masks(in, 0.5);
    std::size_t a = 0, b = 0;
    for (const auto& c : in) {
        const auto& side = c.score >= 0.5 ? r.accepted[a++] : r.rejected[b++];
        EXPECT_EQ(side.mask, c.mask);
        EXPECT_EQ(side.score, c.score);
    }
    EXPECT_EQ(a + b, in.size());
    EXPECT_EQ(a, r.accepted.size());
}

TEST(AugmentNoise, Properties) {
    SplitMix64 rng(7);
    RasterImage img(20, 20, 3);
    for (auto& v : img.data()) v = std::uint8_t(rng.below(256));
    EXPECT_EQ(augment_noise(img, 0.0, 3), img);
    EXPECT_EQ(augment_noise(img, 5.0, 3), augment_noise(img, 5.0, 3));
    EXPECT_NE(augment_noise(img, 5.0, 3), augment_noise(img, 5.0, 4));
    EXPECT_THROW(augment_noise(img, -1.0, 3), std::invalid_argument);

    const RasterImage flat(100, 100, 1, 128);
    const RasterImage noisy = augment_noise(flat, 10.0, 11);
    double sum = 0.0, sq = 0.0;
    for (auto v : noisy.data()) sum += v;
    const double mean = sum / 10000.0;
    for (auto v : noisy.data()) sq += (v - mean) * (v - mean);
    const double sd = std::sqrt(sq / 9999.0);
    EXPECT_GE(sd, 8.0);
    EXPECT_LE(sd, 12.0);
}

TEST(AugmentMixup, Examples) {
    const LabeledImage a{RasterImage(6, 6, 3, 100), SaliencyMap(6, 6, 0.2)};
    const LabeledImage b{RasterImage(6, 6, 3, 200), SaliencyMap(6, 6, 0.8)};
    const LabeledImage one = augment_mixup(a, b, 1.0);
    EXPECT_EQ(one.image, a.image);
    EXPECT_EQ(one.map, a.map);
    const LabeledImage zero = augment_mixup(a, b, 0.0);
    EXPECT_EQ(zero.image, b.image);
    EXPECT_EQ(zero.map, b.map);
    const LabeledImage half = augment_mixup(a, b, 0.5);
    EXPECT_EQ(half.image, RasterImage(6, 6, 3, 150));
    EXPECT_DOUBLE_EQ(half.map.at(3, 3), 0.5);
    const LabeledImage c{RasterImage(5, 6, 3), SaliencyMap(5, 6)};
    EXPECT_THROW(augment_mixup(a, c, 0.5), std::invalid_argument);
    EXPECT_THROW(augment_mixup(a, b, 1.5), std::invalid_argument);
}

TEST(AugmentMixup, Convexity) {
    SplitMix64 rng(8);
    RasterImage ia(10, 10, 1), ib(10, 10, 1);
    for (auto& v : ia.data()) v = std::uint8_t(rng.below(256));
    for (auto& v : ib.data()) v = std::uint8_t(rng.below(256));
    const LabeledImage a{ia, SaliencyMap(10, 10, 0.1)}, b{ib, SaliencyMap(10, 10, 0.9)};
    const auto m = augment_mixup(a, b, rng.uniform());
    for (std::size_t i = 0; i < 100; ++i) {
        const int lo = std::min(ia.data()[i], ib.data()[i]);
        const int hi = std::max(ia.data()[i], ib.data()[i]);
        EXPECT_GE(m.image.data()[i], lo);
        EXPECT_LE(m.image.data()[i], hi);
    }
}

TEST(Spearman, Basics) {
    const std::vector<double> a{1, 2, 3, 4, 5};
    const std::vector<double> b{10, 20, 30, 40, 50};
    const std::vector<double> c{5, 4, 3, 2, 1};
    EXPECT_DOUBLE_EQ(spearman_correlation(a, b), 1.0);
    EXPECT_DOUBLE_EQ(spearman_correlation(a, c), -1.0);
    EXPECT_EQ(spearman_correlation(a, std::vector<double>(5, 2.0)), 0.0);
    // Ties get average ranks: y ranks {1.5, 1.5, 3}.
    EXPECT_NEAR(spearman_correlation(std::vector<double>{1, 2, 3}, std::vector<double>{7, 7, 9}),
                std::sqrt(3.0) / 2.0, 1e-12);
}

TEST(Consensus, MeanOfMasks) {
    BinaryMask a(2, 1), b(2, 1);
    a.set(0, 0);
    b.set(0, 0);
    b.set(1, 0);
    const std::vector<BinaryMask> v{a, b};
    const SaliencyMap c = consensus_map(v);
    EXPECT_EQ(c.at(0, 0), 1.0);
    EXPECT_EQ(c.at(1, 0), 0.5);
    EXPECT_THROW(consensus_map(std::vector<BinaryMask>{}), std::invalid_argument);
}

}  // namespace
}  // namespace liqd
