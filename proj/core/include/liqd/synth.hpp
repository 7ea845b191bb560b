#pragma once

#include <cstdint>
#include <vector>

#include "liqd/imaging.hpp"
#include "liqd/level_state.hpp"
#include "liqd/morphology.hpp"

namespace liqd {

/// Inclusive pixel rectangle.
struct ContainerRect {
    int top = 16;
    int left = 40;
    int bottom = 85;
    int right = 87;

    bool operator==(const ContainerRect&) const = default;
};

/// Scene rendered for every frame: flat background, an open-top rectangular
/// container with left, right and bottom walls, air above the liquid surface
/// and liquid below it. Liquid must be darker than air.
struct SceneSpec {
    int width = 128;
    int height = 96;
    ContainerRect container{};
    int wall_thickness = 3;
    int gray_background = 90;
    int gray_wall = 30;
    int gray_air = 200;
    int gray_liquid = 70;
    double noise_sigma = 4.0;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument when the geometry or contrast contract is violated.
    void validate() const;

    int interior_top() const noexcept { return container.top; }
    int interior_bottom() const noexcept { return container.bottom - wall_thickness; }
    int interior_height() const noexcept { return interior_bottom() - interior_top() + 1; }

    /// First liquid row for a fill fraction (interior_bottom + 1 when empty).
    int level_row(double fill_fraction) const noexcept;

    bool operator==(const SceneSpec&) const = default;
};

struct Scenario {
    LevelState kind = LevelState::LowStatic;
    int frames = 5;
    double level_start = 0.3;
    double level_end = 0.3;
    /// Per-frame level noise, uniform in [-jitter, jitter] rows.
    double jitter = 0.0;
    /// Horizontal container displacement per frame (ContainerMoved).
    int shift_px = 0;

    void validate() const;
    bool operator==(const Scenario&) const = default;
};

struct Sequence {
    std::vector<RasterImage> frames;  // RGB
    std::vector<BinaryMask> masks;    // walls + interior
    std::vector<double> levels;       // first liquid row per frame
    std::vector<LevelState> labels;   // one per adjacent pair
};

/// Label every adjacent pair of a scenario carries. Static kinds are decided
/// by the starting fill fraction.
LevelState scenario_label(const Scenario& scenario) noexcept;

/// Deterministic given (spec, scenario). Noise is per-channel Gaussian drawn
/// from a stream seeded by spec.seed.
Sequence render_sequence(const SceneSpec& spec, const Scenario& scenario);

/// Damages a mask: `breaks` one-pixel cuts straight across the foreground
/// bounding box (splitting it), then `holes` filled disks of radius
/// hole_radius punched fully inside the remaining foreground. Holes keep a
/// two-pixel margin from the background so they stay enclosed.
BinaryMask corrupt_mask(const BinaryMask& mask, int holes, int hole_radius, int breaks, std::uint64_t seed);

/// Scenario drawn for the standard corpus: kind is given, the remaining
/// parameters come from `seed`.
Scenario standard_scenario(LevelState kind, std::uint64_t seed);

/// Kind of the i-th entry of the standard corpus (cycles through all five).
LevelState standard_kind(std::size_t index) noexcept;

}  // namespace liqd
