#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "liqd/imaging.hpp"
#include "liqd/morphology.hpp"

namespace liqd {

struct DiffParams {
    int threshold = 50;
    int block_size = 8;
    double block_fill_ratio = 0.1;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// Per-block motion flags over a ceil(H/b) x ceil(W/b) grid.
class BlockMap {
public:
    BlockMap(int rows, int cols, int block_size);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    int block_size() const noexcept { return block_size_; }
    bool at(int row, int col) const noexcept { return flags_[static_cast<std::size_t>(row) * cols_ + col] != 0; }
    void set(int row, int col, bool value) noexcept { flags_[static_cast<std::size_t>(row) * cols_ + col] = value; }
    std::size_t motion_count() const noexcept;

    bool operator==(const BlockMap&) const = default;

private:
    int rows_;
    int cols_;
    int block_size_;
    std::vector<std::uint8_t> flags_;
};

struct DiffResult {
    BinaryMask pos_plane;  // curr - prev > T
    BinaryMask neg_plane;  // prev - curr > T
    BinaryMask abs_plane;  // union of the two
    BlockMap block_map;
    std::size_t pos_count = 0;
    std::size_t neg_count = 0;
    std::size_t white_count = 0;
};

/// Thresholded difference of two grayscale frames of equal size. The
/// comparison is strict: a difference of exactly T is not marked.
DiffResult frame_diff(const RasterImage& prev, const RasterImage& curr, const DiffParams& params);

/// Marks block (i, j) when its white pixel count exceeds block_fill_ratio
/// times the number of pixels the block actually covers (edge blocks may be
/// partial).
BlockMap classify_blocks(const BinaryMask& abs_plane, const DiffParams& params);

/// Vertical summary of where the frame pair changed.
struct ChangeBand {
    std::optional<int> top_row;        // first row with white pixels inside a motion block
    std::optional<int> bottom_row;     // last such row
    std::optional<double> centroid_row;  // mean row of all white pixels
    double sign_balance = 0.0;         // (pos - neg) / (pos + neg), 0 when both are 0

    bool has_band() const noexcept { return top_row.has_value(); }
};

ChangeBand change_band(const DiffResult& result);

}  // namespace liqd
