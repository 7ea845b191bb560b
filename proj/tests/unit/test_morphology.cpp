#include <gtest/gtest.h>

#include <stdexcept>

#include "liqd/morphology.hpp"
#include "liqd/random.hpp"
#include "oracles.hpp"

namespace liqd {
namespace {

BinaryMask rect(int w, int h, int x0, int y0, int x1, int y1) {
    BinaryMask m(w, h);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) m.set(x, y);
    return m;
}

TEST(EllipseSe, SizeFivePattern) {
    const StructuringElement se = ellipse_se(5);
    EXPECT_EQ(se.size(), 17u);
    for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) {
            const bool expected = (dy == -2 || dy == 2) ? dx == 0 : true;
            EXPECT_EQ(se.contains({dy, dx}), expected) << dy << "," << dx;
        }
    }
}

TEST(EllipseSe, SizeThreeIsPlus) {
    const StructuringElement se = ellipse_se(3);
    EXPECT_EQ(se, StructuringElement({{0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}}));
}

TEST(EllipseSe, LargerSizes) {
    EXPECT_EQ(ellipse_se(7).size(), 33u);
    EXPECT_EQ(ellipse_se(9).size(), 57u);
    EXPECT_EQ(ellipse_se(31).size(), 729u);
    EXPECT_EQ(ellipse_se(31).reach(), 15);
}

TEST(EllipseSe, RejectsBadSizes) {
    for (int s : {4, 1, 2, 33, -5}) EXPECT_THROW(ellipse_se(s), std::invalid_argument) << s;
}

TEST(StructuringElement, Invariants) {
    EXPECT_THROW(StructuringElement({}), std::invalid_argument);
    EXPECT_THROW(StructuringElement({{1, 0}}), std::invalid_argument);
    EXPECT_THROW(StructuringElement({{0, 0}, {16, 0}}), std::invalid_argument);
    EXPECT_EQ(StructuringElement({{0, 0}, {0, 0}, {1, 1}}).size(), 2u);
}

TEST(Dilate, EmptyAndFull) {
    const auto se = ellipse_se(5);
    EXPECT_TRUE(dilate(BinaryMask(9, 9), se).empty());
    EXPECT_EQ(dilate(BinaryMask(9, 9, true), se).count(), 81u);
}

TEST(Dilate, SinglePixelGivesFootprint) {
    BinaryMask m(21, 21);
    m.set(10, 10);
    const auto se = ellipse_se(5);
    const BinaryMask d = dilate(m, se);
    EXPECT_EQ(d.count(), se.size());
    for (const Offset& o : se.offsets()) EXPECT_TRUE(d.at(10 + o.dx, 10 + o.dy));
}

TEST(Dilate, AsymmetricElementFollowsSetDefinition) {
    // Element {(0,0), (0,+1)}: z is set iff A contains z or z + (1, 0).
    BinaryMask m(5, 1);
    m.set(2, 0);
    const BinaryMask d = dilate(m, StructuringElement({{0, 0}, {0, 1}}));
    EXPECT_TRUE(d.at(1, 0));
    EXPECT_TRUE(d.at(2, 0));
    EXPECT_FALSE(d.at(3, 0));
}

TEST(Erode, FiveByFiveKeepsCenter) {
    const BinaryMask e = erode(BinaryMask(5, 5, true), ellipse_se(5));
    EXPECT_EQ(e.count(), 1u);
    EXPECT_TRUE(e.at(2, 2));
}

TEST(Erode, SingletonIsIdentity) {
    SplitMix64 rng(2);
    const BinaryMask m = oracle::random_mask(16, 16, 0.5, rng);
    EXPECT_EQ(erode(m, StructuringElement::singleton()), m);
    EXPECT_EQ(dilate(m, StructuringElement::singleton()), m);
    EXPECT_TRUE(erode(BinaryMask(6, 6), ellipse_se(3)).empty());
}

TEST(Morphology, MatchesSetDefinitionOracle) {
    SplitMix64 rng(77);
    for (int i = 0; i < 40; ++i) {
        const BinaryMask m = oracle::random_mask(24, 20, rng.uniform(0.1, 0.9), rng);
        const StructuringElement se = oracle::random_se(rng);
        ASSERT_EQ(dilate(m, se), oracle::dilate(m, se)) << i;
        ASSERT_EQ(erode(m, se), oracle::erode(m, se)) << i;
    }
}

TEST(Morphology, ExtensivityAndAntiExtensivity) {
    SplitMix64 rng(8);
    for (int i = 0; i < 30; ++i) {
        const BinaryMask m = oracle::random_mask(32, 32, 0.4, rng);
        const StructuringElement se = oracle::random_se(rng);
        EXPECT_TRUE(m.is_subset_of(dilate(m, se)));
        EXPECT_TRUE(erode(m, se).is_subset_of(m));
    }
}

TEST(Morphology, DualityAwayFromBorder) {
    SplitMix64 rng(19);
    for (int i = 0; i < 30; ++i) {
        const BinaryMask m = oracle::random_mask(32, 32, 0.5, rng);
        // Symmetric element, so its reflection is itself.
        const StructuringElement se = ellipse_se(2 * rng.range(1, 3) + 1);
        const BinaryMask lhs = erode(m, se);
        const BinaryMask rhs = dilate(m.complement(), se).complement();
        const int r = se.reach();
        for (int y = r; y < 32 - r; ++y)
            for (int x = r; x < 32 - r; ++x) ASSERT_EQ(lhs.at(x, y), rhs.at(x, y));
    }
}

TEST(Close, FillsPinhole) {
    BinaryMask m = rect(30, 30, 5, 5, 24, 24);
    m.set(14, 14, false);
    const BinaryMask c = close(m, ellipse_se(5));
    EXPECT_EQ(c, rect(30, 30, 5, 5, 24, 24));
}

TEST(Close, Idempotent) {
    SplitMix64 rng(23);
    for (int i = 0; i < 30; ++i) {
        const BinaryMask m = oracle::random_mask(32, 32, rng.uniform(0.2, 0.8), rng);
        const auto se = ellipse_se(2 * rng.range(1, 3) + 1);
        const BinaryMask c = close(m, se);
        EXPECT_EQ(close(c, se), c) << i;
        EXPECT_EQ(c, oracle::erode(oracle::dilate(m, se), se));
    }
    EXPECT_TRUE(close(BinaryMask(8, 8), ellipse_se(5)).empty());
}

TEST(FillHoles, DonutBecomesDisk) {
    BinaryMask donut(21, 21), disk(21, 21);
    for (int y = 0; y < 21; ++y) {
        for (int x = 0; x < 21; ++x) {
            const int d2 = (x - 10) * (x - 10) + (y - 10) * (y - 10);
            donut.set(x, y, d2 <= 64 && d2 > 16);
            disk.set(x, y, d2 <= 64);
        }
    }
    EXPECT_EQ(fill_holes(donut), disk);
}

TEST(FillHoles, BorderBackgroundUntouched) {
    const BinaryMask m = rect(10, 10, 0, 0, 4, 9);
    EXPECT_EQ(fill_holes(m), m);
    EXPECT_EQ(fill_holes(BinaryMask(4, 4, true)).count(), 16u);
}

TEST(FillHoles, DiagonalGapDoesNotLeak) {
    // Background enclosed except for a diagonal step is still a hole (4-connectivity).
    BinaryMask m = rect(7, 7, 1, 1, 5, 5);
    m.set(3, 3, false);
    m.set(1, 1, false);
    m.set(2, 2, false);
    const BinaryMask f = fill_holes(m);
    EXPECT_TRUE(f.at(3, 3));
    EXPECT_TRUE(f.at(2, 2));
    EXPECT_FALSE(f.at(1, 1));
}

TEST(Compensate, KeepsInteriorForeground) {
    SplitMix64 rng(4);
    const auto se = ellipse_se(5);
    for (int i = 0; i < 30; ++i) {
        BinaryMask m(40, 40);
        BinaryMask inner = oracle::random_mask(40, 40, 0.6, rng);
        for (int y = 3; y < 37; ++y)
            for (int x = 3; x < 37; ++x) m.set(x, y, inner.at(x, y));
        EXPECT_TRUE(m.is_subset_of(compensate(m, se))) << i;
    }
    EXPECT_TRUE(compensate(BinaryMask(9, 9), se).empty());
}

TEST(ApplyMask, Basics) {
    RasterImage img(4, 4, 3, 77);
    EXPECT_EQ(apply_mask(img, BinaryMask(4, 4, true)), img);
    EXPECT_EQ(apply_mask(img, BinaryMask(4, 4)), RasterImage(4, 4, 3, 0));
    const RasterImage half = apply_mask(img, rect(4, 4, 0, 0, 3, 1));
    EXPECT_EQ(half.at(2, 1, 2), 77);
    EXPECT_EQ(half.at(2, 2, 2), 0);
    EXPECT_THROW(apply_mask(img, BinaryMask(3, 4)), std::invalid_argument);
}

TEST(BinaryMask, ImageRoundTripAndIou) {
    SplitMix64 rng(6);
    const BinaryMask m = oracle::random_mask(9, 5, 0.5, rng);
    EXPECT_EQ(BinaryMask::from_image(m.to_image()), m);
    EXPECT_DOUBLE_EQ(mask_iou(BinaryMask(3, 3), BinaryMask(3, 3)), 1.0);
    EXPECT_DOUBLE_EQ(mask_iou(rect(4, 4, 0, 0, 1, 3), rect(4, 4, 0, 0, 3, 3)), 0.5);
}

TEST(Components, EightConnected) {
    BinaryMask m(6, 6);
    m.set(0, 0);
    m.set(1, 1);
    m.set(4, 4);
    EXPECT_EQ(count_components(m), 2u);
    const BoundingBox b = bounding_box(m);
    EXPECT_EQ(b.top, 0);
    EXPECT_EQ(b.right, 4);
    EXPECT_TRUE(bounding_box(BinaryMask(2, 2)).empty());
}

}  // namespace
}  // namespace liqd
