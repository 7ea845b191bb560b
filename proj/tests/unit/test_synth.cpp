#include <gtest/gtest.h>

#include <stdexcept>

#include "liqd/diffseg.hpp"
#include "liqd/morphology.hpp"
#include "liqd/synth.hpp"

namespace liqd {
namespace {

SceneSpec quiet_scene(std::uint64_t seed = 1) {
    SceneSpec s;
    s.noise_sigma = 0.0;
    s.seed = seed;
    return s;
}

Scenario make(LevelState kind, int frames, double start, double end, int shift = 0) {
    Scenario s;
    s.kind = kind;
    s.frames = frames;
    s.level_start = start;
    s.level_end = end;
    s.shift_px = shift;
    return s;
}

RasterImage gray_of(const RasterImage& rgb) {
    RasterImage g(rgb.width(), rgb.height(), 1);
    for (int y = 0; y < rgb.height(); ++y)
        for (int x = 0; x < rgb.width(); ++x) g.at(x, y) = rgb.at(x, y, 0);
    return g;
}

TEST(RenderSequence, LowStaticIsConstant) {
    const Sequence s = render_sequence(quiet_scene(), make(LevelState::LowStatic, 4, 0.3, 0.3));
    ASSERT_EQ(s.frames.size(), 4u);
    ASSERT_EQ(s.labels.size(), 3u);
    for (const auto& f : s.frames) EXPECT_EQ(f, s.frames[0]);
    for (LevelState l : s.labels) EXPECT_EQ(l, LevelState::LowStatic);
    for (int t : {1, 20, 60}) {
        DiffParams p;
        p.threshold = t;
        EXPECT_EQ(frame_diff(gray_of(s.frames[0]), gray_of(s.frames[1]), p).white_count, 0u);
    }
}

TEST(RenderSequence, StaticLabelFollowsFill) {
    const Sequence s = render_sequence(quiet_scene(), make(LevelState::LowStatic, 3, 0.7, 0.7));
    EXPECT_EQ(s.labels[0], LevelState::HighStatic);
    EXPECT_EQ(scenario_label(make(LevelState::HighStatic, 3, 0.2, 0.2)), LevelState::LowStatic);
}

TEST(RenderSequence, RisingGeometry) {
    const SceneSpec spec = quiet_scene();
    const Sequence s = render_sequence(spec, make(LevelState::Rising, 7, 0.2, 0.8));
    for (std::size_t k = 1; k < s.levels.size(); ++k) EXPECT_LT(s.levels[k], s.levels[k - 1]);
    const int t = spec.wall_thickness;
    const auto& c = spec.container;
    for (std::size_t k = 1; k < s.frames.size(); ++k) {
        DiffParams p;
        p.threshold = 1;
        const DiffResult d = frame_diff(gray_of(s.frames[k - 1]), gray_of(s.frames[k]), p);
        EXPECT_EQ(count_components(d.abs_plane), 1u);
        EXPECT_GT(d.white_count, 0u);
        for (int y = 0; y < spec.height; ++y)
            for (int x = 0; x < spec.width; ++x) {
                if (!d.abs_plane.at(x, y)) continue;
                EXPECT_GE(y, s.levels[k]);
                EXPECT_LT(y, s.levels[k - 1]);
                EXPECT_GE(x, c.left + t);
                EXPECT_LE(x, c.right - t);
            }
    }
    for (LevelState l : s.labels) EXPECT_EQ(l, LevelState::Rising);
}

TEST(RenderSequence, LevelRowFromFill) {
    const SceneSpec spec;
    EXPECT_EQ(spec.interior_height(), 67);
    EXPECT_EQ(spec.level_row(0.0), spec.interior_bottom() + 1);
    EXPECT_EQ(spec.level_row(1.0), spec.interior_top());
}

TEST(RenderSequence, ContainerMovedTranslatesMasks) {
    const Sequence s = render_sequence(quiet_scene(), make(LevelState::ContainerMoved, 4, 0.3, 0.3, 5));
    for (std::size_t k = 1; k < s.masks.size(); ++k) {
        const BinaryMask& a = s.masks[k - 1];
        const BinaryMask& b = s.masks[k];
        for (int y = 0; y < a.height(); ++y)
            for (int x = 0; x < a.width(); ++x) EXPECT_EQ(b.get_or_background(x + 5, y), a.at(x, y));
    }
    EXPECT_EQ(s.labels[0], LevelState::ContainerMoved);
}

TEST(RenderSequence, DeterministicAndLabelsIgnoreNoise) {
    SceneSpec spec;
    spec.seed = 42;
    const Scenario sc = make(LevelState::Falling, 5, 0.8, 0.2);
    const Sequence a = render_sequence(spec, sc), b = render_sequence(spec, sc);
    EXPECT_EQ(a.frames, b.frames);
    EXPECT_EQ(a.levels, b.levels);
    spec.seed = 43;
    const Sequence c = render_sequence(spec, sc);
    EXPECT_NE(a.frames, c.frames);
    EXPECT_EQ(a.labels, c.labels);
    EXPECT_EQ(a.levels, c.levels);
}

TEST(RenderSequence, JitterStaysInside) {
    SceneSpec spec = quiet_scene(9);
    Scenario sc = make(LevelState::LowStatic, 12, 0.02, 0.02);
    sc.jitter = 6.0;
    const Sequence s = render_sequence(spec, sc);
    for (double l : s.levels) {
        EXPECT_GE(l, spec.interior_top());
        EXPECT_LE(l, spec.interior_bottom() + 1);
    }
}

TEST(Validation, RejectsBadGeometryAndScenarios) {
    SceneSpec spec;
    spec.container.left = 1;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
    spec = {};
    spec.container.bottom = spec.height - 2;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
    spec = {};
    spec.gray_liquid = 150;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
    spec = {};
    spec.gray_liquid = 210;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
    spec = {};
    spec.wall_thickness = 30;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
    EXPECT_NO_THROW(SceneSpec{}.validate());

    EXPECT_THROW(make(LevelState::Rising, 5, 0.6, 0.4).validate(), std::invalid_argument);
    EXPECT_THROW(make(LevelState::Falling, 5, 0.4, 0.6).validate(), std::invalid_argument);
    EXPECT_THROW(make(LevelState::LowStatic, 5, 0.4, 0.5).validate(), std::invalid_argument);
    EXPECT_THROW(make(LevelState::LowStatic, 1, 0.4, 0.4).validate(), std::invalid_argument);
    EXPECT_THROW(make(LevelState::LowStatic, 3, 1.4, 1.4).validate(), std::invalid_argument);
    EXPECT_THROW(make(LevelState::ContainerMoved, 3, 0.4, 0.4, 0).validate(), std::invalid_argument);
    // Moving the container out of frame is invalid geometry.
    EXPECT_THROW(render_sequence(SceneSpec{}, make(LevelState::ContainerMoved, 6, 0.3, 0.3, 30)),
                 std::invalid_argument);
}

TEST(CorruptMask, IdentityWithoutDamage) {
    const Sequence s = render_sequence(quiet_scene(), make(LevelState::LowStatic, 2, 0.3, 0.3));
    EXPECT_EQ(corrupt_mask(s.masks[0], 0, 2, 0, 5), s.masks[0]);
    EXPECT_THROW(corrupt_mask(s.masks[0], -1, 2, 0, 5), std::invalid_argument);
}

TEST(CorruptMask, HoleAreaBound) {
    const BinaryMask solid = render_sequence(quiet_scene(), make(LevelState::LowStatic, 2, 0.3, 0.3)).masks[0];
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const BinaryMask c = corrupt_mask(solid, 3, 2, 0, seed);
        EXPECT_TRUE(c.is_subset_of(solid));
        EXPECT_LE(solid.count() - c.count(), 3u * 13u);
        EXPECT_GT(solid.count() - c.count(), 0u);
        EXPECT_EQ(c, corrupt_mask(solid, 3, 2, 0, seed));
    }
}

TEST(CorruptMask, CompensateRepairs) {
    const auto se = ellipse_se(5);
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        SceneSpec spec = quiet_scene(seed);
        const BinaryMask clean = render_sequence(spec, make(LevelState::LowStatic, 2, 0.3, 0.3)).masks[0];
        const BinaryMask broken = corrupt_mask(clean, 3, 2, 2, seed);
        EXPECT_LT(mask_iou(broken, clean), 1.0);
        EXPECT_GE(mask_iou(compensate(broken, se), clean), 0.98) << seed;
    }
}

TEST(StandardScenario, ValidForAllKinds) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const LevelState kind = standard_kind(seed);
        const Scenario sc = standard_scenario(kind, seed);
        EXPECT_EQ(sc.kind, kind);
        EXPECT_NO_THROW(sc.validate());
        EXPECT_NO_THROW(render_sequence(SceneSpec{}, sc));
    }
    EXPECT_EQ(standard_kind(0), LevelState::LowStatic);
    EXPECT_EQ(standard_kind(9), LevelState::ContainerMoved);
}

}  // namespace
}  // namespace liqd
