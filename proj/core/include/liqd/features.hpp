#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "liqd/diffseg.hpp"
#include "liqd/level_state.hpp"
#include "liqd/morphology.hpp"

namespace liqd {

inline constexpr int kFeatureGrid = 16;
inline constexpr std::size_t kGridCells = kFeatureGrid * kFeatureGrid;
inline constexpr std::size_t kGlobalFeatures = 5;
inline constexpr std::size_t kFeatureLength = 2 * kGridCells + kGlobalFeatures;  // 517

/// Width in pixels of the band around the container outline that counts as
/// "on the boundary".
inline constexpr int kBoundaryBandPx = 2;

/// Fixed-layout classifier input:
///   [0, 256)    pos_plane densities over a 16x16 grid on the container box
///   [256, 512)  neg_plane densities, same grid
///   512..516    white_count_rate, sign_balance, band_top_fraction,
///               band_height_fraction, boundary_overlap_fraction
///
/// band_top_fraction is the top of the change band measured from the
/// container top, as a fraction of container height. Without a band it
/// carries the last known surface position, 1 - prev_fill_fraction, so the
/// two static states stay separable.
struct FeatureVector {
    std::array<double, kFeatureLength> values{};

    double grid_pos(int row, int col) const noexcept { return values[static_cast<std::size_t>(row * kFeatureGrid + col)]; }
    double grid_neg(int row, int col) const noexcept {
        return values[kGridCells + static_cast<std::size_t>(row * kFeatureGrid + col)];
    }
    double white_count_rate() const noexcept { return values[2 * kGridCells + 0]; }
    double sign_balance() const noexcept { return values[2 * kGridCells + 1]; }
    double band_top_fraction() const noexcept { return values[2 * kGridCells + 2]; }
    double band_height_fraction() const noexcept { return values[2 * kGridCells + 3]; }
    double boundary_overlap_fraction() const noexcept { return values[2 * kGridCells + 4]; }

    std::span<const double> span() const noexcept { return values; }
    bool operator==(const FeatureVector&) const = default;
};

/// Throws std::invalid_argument for an empty container mask, mismatched
/// dimensions or prev_fill_fraction outside [0, 1].
FeatureVector extract_features(const DiffResult& diff, const BinaryMask& container_mask, double prev_fill_fraction);

/// Rule-based reference classifier:
///   ContainerMoved  boundary overlap > 0.5 and band height > 60% of the container
///   static          white_count <= noise_floor; Low/High by prev_fill_fraction
///   Rising          net darkening (liquid is darker than air), otherwise Falling
LevelState heuristic_classify(const DiffResult& diff, const BinaryMask& container_mask, double prev_fill_fraction,
                              std::size_t noise_floor);

/// Same rules applied to precomputed features.
LevelState heuristic_classify(const FeatureVector& features, std::size_t white_count, double prev_fill_fraction,
                              std::size_t noise_floor);

}  // namespace liqd
