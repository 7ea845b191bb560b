#include "liqd/features.hpp"

#include <algorithm>
#include <stdexcept>

namespace liqd {
namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

FeatureVector extract_features(const DiffResult& diff, const BinaryMask& container_mask, double prev_fill_fraction) {
    if (!(prev_fill_fraction >= 0.0 && prev_fill_fraction <= 1.0)) {
        throw std::invalid_argument("prev_fill_fraction must be in [0, 1]");
    }
    if (!container_mask.same_shape(diff.abs_plane)) {
        throw std::invalid_argument("container mask and difference planes differ in size");
    }
    const BoundingBox box = bounding_box(container_mask);
    if (box.empty()) throw std::invalid_argument("container mask is empty");

    FeatureVector f;
    const int h = box.height();
    const int w = box.width();
    for (int i = 0; i < kFeatureGrid; ++i) {
        const int y0 = box.top + i * h / kFeatureGrid;
        const int y1 = box.top + (i + 1) * h / kFeatureGrid;
        for (int j = 0; j < kFeatureGrid; ++j) {
            const int x0 = box.left + j * w / kFeatureGrid;
            const int x1 = box.left + (j + 1) * w / kFeatureGrid;
            const int area = (y1 - y0) * (x1 - x0);
            if (area <= 0) continue;
            int pos = 0;
            int neg = 0;
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) {
                    pos += diff.pos_plane.at(x, y) ? 1 : 0;
                    neg += diff.neg_plane.at(x, y) ? 1 : 0;
                }
            }
            const auto cell = static_cast<std::size_t>(i * kFeatureGrid + j);
            f.values[cell] = static_cast<double>(pos) / area;
            f.values[kGridCells + cell] = static_cast<double>(neg) / area;
        }
    }

    const ChangeBand band = change_band(diff);
    const double area = static_cast<double>(container_mask.count());
    const std::size_t g = 2 * kGridCells;
    f.values[g + 0] = clamp01(static_cast<double>(diff.white_count) / area);
    f.values[g + 1] = band.sign_balance;
    if (band.has_band()) {
        f.values[g + 2] = clamp01(static_cast<double>(*band.top_row - box.top) / h);
        f.values[g + 3] = clamp01(static_cast<double>(*band.bottom_row - *band.top_row + 1) / h);
    } else {
        f.values[g + 2] = clamp01(1.0 - prev_fill_fraction);
        f.values[g + 3] = 0.0;
    }

    if (diff.white_count > 0) {
        const BinaryMask zone = dilate(inner_boundary(container_mask), StructuringElement::square(kBoundaryBandPx));
        std::size_t near = 0;
        auto z = zone.bits();
        auto a = diff.abs_plane.bits();
        for (std::size_t i = 0; i < a.size(); ++i) near += a[i] & z[i];
        f.values[g + 4] = static_cast<double>(near) / static_cast<double>(diff.white_count);
    }
    return f;
}

LevelState heuristic_classify(const FeatureVector& features, std::size_t white_count, double prev_fill_fraction,
                              std::size_t noise_floor) {
    if (features.boundary_overlap_fraction() > 0.5 && features.band_height_fraction() > 0.6) {
        return LevelState::ContainerMoved;
    }
    if (white_count <= noise_floor) return static_state_for_fill(prev_fill_fraction);
    return features.sign_balance() < 0.0 ? LevelState::Rising : LevelState::Falling;
}

LevelState heuristic_classify(const DiffResult& diff, const BinaryMask& container_mask, double prev_fill_fraction,
                              std::size_t noise_floor) {
    return heuristic_classify(extract_features(diff, container_mask, prev_fill_fraction), diff.white_count,
                              prev_fill_fraction, noise_floor);
}

}  // namespace liqd
