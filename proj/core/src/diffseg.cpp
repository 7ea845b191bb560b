#include "liqd/diffseg.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace liqd {

void DiffParams::validate() const {
    if (threshold < 1 || threshold > 254) {
        throw std::invalid_argument("difference threshold must be in [1, 254], got " + std::to_string(threshold));
    }
    if (block_size < 1) throw std::invalid_argument("block size must be >= 1");
    if (!(block_fill_ratio > 0.0 && block_fill_ratio <= 1.0)) {
        throw std::invalid_argument("block fill ratio must be in (0, 1]");
    }
}

BlockMap::BlockMap(int rows, int cols, int block_size)
    : rows_(rows), cols_(cols), block_size_(block_size),
      flags_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0) {}

std::size_t BlockMap::motion_count() const noexcept {
    return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), std::uint8_t{1}));
}

BlockMap classify_blocks(const BinaryMask& abs_plane, const DiffParams& params) {
    params.validate();
    const int b = params.block_size;
    const int rows = (abs_plane.height() + b - 1) / b;
    const int cols = (abs_plane.width() + b - 1) / b;
    BlockMap map(rows, cols, b);
    for (int i = 0; i < rows; ++i) {
        const int y0 = i * b;
        const int y1 = std::min(abs_plane.height(), y0 + b);
        for (int j = 0; j < cols; ++j) {
            const int x0 = j * b;
            const int x1 = std::min(abs_plane.width(), x0 + b);
            int white = 0;
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) white += abs_plane.at(x, y) ? 1 : 0;
            }
            const double area = static_cast<double>((y1 - y0) * (x1 - x0));
            map.set(i, j, static_cast<double>(white) > params.block_fill_ratio * area);
        }
    }
    return map;
}

DiffResult frame_diff(const RasterImage& prev, const RasterImage& curr, const DiffParams& params) {
    params.validate();
    if (!prev.is_gray() || !curr.is_gray()) throw std::invalid_argument("frame_diff expects grayscale frames");
    if (!prev.same_shape(curr)) {
        throw std::invalid_argument("frame_diff: frame sizes differ (" + std::to_string(prev.width()) + "x" +
                                    std::to_string(prev.height()) + " vs " + std::to_string(curr.width()) + "x" +
                                    std::to_string(curr.height()) + ")");
    }
    const int w = prev.width();
    const int h = prev.height();
    BinaryMask pos(w, h);
    BinaryMask neg(w, h);
    BinaryMask both(w, h);
    auto p = prev.data();
    auto c = curr.data();
    auto pb = pos.bits();
    auto nb = neg.bits();
    auto ab = both.bits();
    std::size_t pos_count = 0;
    std::size_t neg_count = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const int d = static_cast<int>(c[i]) - static_cast<int>(p[i]);
        if (d > params.threshold) {
            pb[i] = ab[i] = 1;
            ++pos_count;
        } else if (-d > params.threshold) {
            nb[i] = ab[i] = 1;
            ++neg_count;
        }
    }
    BlockMap blocks = classify_blocks(both, params);
    return DiffResult{std::move(pos), std::move(neg), std::move(both), std::move(blocks),
                      pos_count, neg_count, pos_count + neg_count};
}

ChangeBand change_band(const DiffResult& result) {
    ChangeBand band;
    const std::size_t total = result.pos_count + result.neg_count;
    if (total > 0) {
        band.sign_balance = (static_cast<double>(result.pos_count) - static_cast<double>(result.neg_count)) /
                            static_cast<double>(total);
    }
    const BinaryMask& plane = result.abs_plane;
    const int b = result.block_map.block_size();
    double row_sum = 0.0;
    std::size_t white = 0;
    for (int y = 0; y < plane.height(); ++y) {
        for (int x = 0; x < plane.width(); ++x) {
            if (!plane.at(x, y)) continue;
            row_sum += y;
            ++white;
            if (!result.block_map.at(y / b, x / b)) continue;
            if (!band.top_row) band.top_row = y;
            band.bottom_row = y;
        }
    }
    if (white > 0) band.centroid_row = row_sum / static_cast<double>(white);
    return band;
}

}  // namespace liqd
