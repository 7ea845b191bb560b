#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "liqd/imaging.hpp"

namespace liqd {

/// Row-major boolean grid. Serialized as 8-bit gray with foreground = 255.
class BinaryMask {
public:
    BinaryMask(int width, int height, bool fill = false);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return bits_.size(); }
    bool same_shape(const BinaryMask& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }
    bool in_bounds(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    bool at(int x, int y) const noexcept { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool value = true) noexcept { bits_[index(x, y)] = value ? 1 : 0; }

    /// Out-of-bounds reads are background.
    bool get_or_background(int x, int y) const noexcept { return in_bounds(x, y) && at(x, y); }

    std::size_t count() const noexcept;
    bool empty() const noexcept { return count() == 0; }

    /// Raw 0/1 bytes, row-major.
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    std::span<std::uint8_t> bits() noexcept { return bits_; }

    BinaryMask complement() const;
    bool is_subset_of(const BinaryMask& other) const;

    /// Nonzero gray levels (>= 128) become foreground; RGB uses the brightest channel.
    static BinaryMask from_image(const RasterImage& image);
    RasterImage to_image() const;

    bool operator==(const BinaryMask&) const = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

BinaryMask operator|(const BinaryMask& a, const BinaryMask& b);
BinaryMask operator&(const BinaryMask& a, const BinaryMask& b);

/// |a ∩ b| / |a ∪ b|; two empty masks have IoU 1.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

struct Offset {
    int dy = 0;
    int dx = 0;
    auto operator<=>(const Offset&) const = default;
};

/// Set of displacements probed around the anchor (0, 0). Offsets are kept
/// sorted and unique.
class StructuringElement {
public:
    static constexpr int kMaxReach = 15;

    explicit StructuringElement(std::vector<Offset> offsets);

    std::span<const Offset> offsets() const noexcept { return offsets_; }
    std::size_t size() const noexcept { return offsets_.size(); }
    /// Largest |dy| or |dx|.
    int reach() const noexcept { return reach_; }
    bool contains(Offset o) const noexcept;

    static StructuringElement singleton();
    /// Filled (2r+1)x(2r+1) square.
    static StructuringElement square(int radius);

    bool operator==(const StructuringElement&) const = default;

private:
    std::vector<Offset> offsets_;
    int reach_ = 0;
};

/// Discrete ellipse inscribed in a size x size box, OpenCV MORPH_ELLIPSE
/// convention: with r = size/2, row dy spans |dx| <= round(sqrt(r^2 - dy^2)).
/// size must be odd and in [3, 31].
StructuringElement ellipse_se(int size);

/// Pixel set iff some offset of the element, placed at the pixel, lands on
/// foreground. Outside the image is background.
BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se);

/// Pixel set iff every offset lands on foreground. Outside the image is
/// background, so foreground touching the border erodes.
BinaryMask erode(const BinaryMask& mask, const StructuringElement& se);

/// erode(dilate(mask)).
BinaryMask close(const BinaryMask& mask, const StructuringElement& se);

/// Background regions not 4-connected to the image border become foreground.
BinaryMask fill_holes(const BinaryMask& mask);

/// Mask repair used by the pipeline: fill_holes(close(mask, se)).
BinaryMask compensate(const BinaryMask& mask, const StructuringElement& se);

/// Keeps image pixels under the mask and blacks out the rest.
RasterImage apply_mask(const RasterImage& image, const BinaryMask& mask);

/// Foreground pixels with at least one 4-neighbour in the background (the
/// image outside counts as background).
BinaryMask inner_boundary(const BinaryMask& mask);

struct BoundingBox {
    int top = 0;
    int left = 0;
    int bottom = -1;  // inclusive
    int right = -1;   // inclusive
    int height() const noexcept { return bottom - top + 1; }
    int width() const noexcept { return right - left + 1; }
    bool empty() const noexcept { return bottom < top || right < left; }
};

BoundingBox bounding_box(const BinaryMask& mask);

/// Number of 8-connected foreground components.
std::size_t count_components(const BinaryMask& mask);

}  // namespace liqd
