#include "liqd/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <string>

namespace liqd {

BinaryMask::BinaryMask(int width, int height, bool fill) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw std::invalid_argument("mask dimensions must be >= 1");
    bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0);
}

std::size_t BinaryMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BinaryMask BinaryMask::complement() const {
    BinaryMask out = *this;
    for (auto& b : out.bits_) b ^= 1;
    return out;
}

bool BinaryMask::is_subset_of(const BinaryMask& other) const {
    if (!same_shape(other)) throw std::invalid_argument("mask dimension mismatch");
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i] && !other.bits_[i]) return false;
    }
    return true;
}

BinaryMask BinaryMask::from_image(const RasterImage& image) {
    BinaryMask out(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            int v = image.at(x, y, 0);
            for (int c = 1; c < image.channels(); ++c) v = std::max<int>(v, image.at(x, y, c));
            out.set(x, y, v >= 128);
        }
    }
    return out;
}

RasterImage BinaryMask::to_image() const {
    RasterImage out(width_, height_, 1);
    auto data = out.data();
    for (std::size_t i = 0; i < bits_.size(); ++i) data[i] = bits_[i] ? 255 : 0;
    return out;
}

BinaryMask operator|(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("mask dimension mismatch");
    BinaryMask out = a;
    auto dst = out.bits();
    auto src = b.bits();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] |= src[i];
    return out;
}

BinaryMask operator&(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("mask dimension mismatch");
    BinaryMask out = a;
    auto dst = out.bits();
    auto src = b.bits();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] &= src[i];
    return out;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("mask dimension mismatch");
    std::size_t inter = 0;
    std::size_t uni = 0;
    auto pa = a.bits();
    auto pb = b.bits();
    for (std::size_t i = 0; i < pa.size(); ++i) {
        inter += pa[i] & pb[i];
        uni += pa[i] | pb[i];
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

StructuringElement::StructuringElement(std::vector<Offset> offsets) : offsets_(std::move(offsets)) {
    std::sort(offsets_.begin(), offsets_.end());
    offsets_.erase(std::unique(offsets_.begin(), offsets_.end()), offsets_.end());
    if (offsets_.empty()) throw std::invalid_argument("structuring element must not be empty");
    if (!contains({0, 0})) throw std::invalid_argument("structuring element must contain the anchor (0, 0)");
    for (const auto& o : offsets_) {
        if (std::abs(o.dy) > kMaxReach || std::abs(o.dx) > kMaxReach) {
            throw std::invalid_argument("structuring element offset exceeds reach " + std::to_string(kMaxReach));
        }
        reach_ = std::max({reach_, std::abs(o.dy), std::abs(o.dx)});
    }
}

bool StructuringElement::contains(Offset o) const noexcept {
    return std::binary_search(offsets_.begin(), offsets_.end(), o);
}

StructuringElement StructuringElement::singleton() { return StructuringElement({{0, 0}}); }

StructuringElement StructuringElement::square(int radius) {
    if (radius < 0 || radius > kMaxReach) throw std::invalid_argument("square radius out of range");
    std::vector<Offset> offsets;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) offsets.push_back({dy, dx});
    }
    return StructuringElement(std::move(offsets));
}

StructuringElement ellipse_se(int size) {
    if (size < 3 || size > 31 || size % 2 == 0) {
        throw std::invalid_argument("ellipse size must be odd and in [3, 31], got " + std::to_string(size));
    }
    const int r = size / 2;
    std::vector<Offset> offsets;
    for (int dy = -r; dy <= r; ++dy) {
        // sqrt(r^2 - dy^2) is never an exact half-integer, so rounding has no ties.
        const int span = static_cast<int>(std::lround(std::sqrt(static_cast<double>(r * r - dy * dy))));
        for (int dx = -span; dx <= span; ++dx) offsets.push_back({dy, dx});
    }
    return StructuringElement(std::move(offsets));
}

namespace {

// Visits every (y, x) whose shifted position (y + dy, x + dx) stays inside.
template <typename Fn>
void for_shifted(int width, int height, Offset o, Fn&& fn) {
    const int y0 = std::max(0, -o.dy);
    const int y1 = std::min(height, height - o.dy);
    const int x0 = std::max(0, -o.dx);
    const int x1 = std::min(width, width - o.dx);
    for (int y = y0; y < y1; ++y) fn(y, x0, x1);
}

}  // namespace

BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se) {
    const int w = mask.width();
    const int h = mask.height();
    BinaryMask out(w, h);
    auto src = mask.bits();
    auto dst = out.bits();
    for (const Offset& o : se.offsets()) {
        for_shifted(w, h, o, [&](int y, int x0, int x1) {
            const std::uint8_t* s = src.data() + static_cast<std::size_t>(y + o.dy) * w + o.dx;
            std::uint8_t* d = dst.data() + static_cast<std::size_t>(y) * w;
            for (int x = x0; x < x1; ++x) d[x] |= s[x];
        });
    }
    return out;
}

BinaryMask erode(const BinaryMask& mask, const StructuringElement& se) {
    const int w = mask.width();
    const int h = mask.height();
    BinaryMask out = mask;
    auto src = mask.bits();
    auto dst = out.bits();
    std::vector<std::uint8_t> valid(dst.size());
    for (const Offset& o : se.offsets()) {
        // Pixels whose probe falls outside the image see background.
        std::fill(valid.begin(), valid.end(), std::uint8_t{0});
        for_shifted(w, h, o, [&](int y, int x0, int x1) {
            const std::uint8_t* s = src.data() + static_cast<std::size_t>(y + o.dy) * w + o.dx;
            std::uint8_t* d = dst.data() + static_cast<std::size_t>(y) * w;
            std::uint8_t* v = valid.data() + static_cast<std::size_t>(y) * w;
            for (int x = x0; x < x1; ++x) {
                d[x] &= s[x];
                v[x] = 1;
            }
        });
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] &= valid[i];
    }
    return out;
}

BinaryMask close(const BinaryMask& mask, const StructuringElement& se) {
    return erode(dilate(mask, se), se);
}

BinaryMask fill_holes(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    BinaryMask outside(w, h);
    std::deque<std::pair<int, int>> queue;
    auto seed = [&](int x, int y) {
        if (!mask.at(x, y) && !outside.at(x, y)) {
            outside.set(x, y);
            queue.emplace_back(x, y);
        }
    };
    for (int x = 0; x < w; ++x) {
        seed(x, 0);
        seed(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        seed(0, y);
        seed(w - 1, y);
    }
    constexpr int kDx[4] = {1, -1, 0, 0};
    constexpr int kDy[4] = {0, 0, 1, -1};
    while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        for (int k = 0; k < 4; ++k) {
            const int nx = x + kDx[k];
            const int ny = y + kDy[k];
            if (mask.in_bounds(nx, ny)) seed(nx, ny);
        }
    }
    return outside.complement();
}

BinaryMask compensate(const BinaryMask& mask, const StructuringElement& se) {
    return fill_holes(close(mask, se));
}

RasterImage apply_mask(const RasterImage& image, const BinaryMask& mask) {
    if (image.width() != mask.width() || image.height() != mask.height()) {
        throw std::invalid_argument("apply_mask: image is " + std::to_string(image.width()) + "x" +
                                    std::to_string(image.height()) + " but mask is " +
                                    std::to_string(mask.width()) + "x" + std::to_string(mask.height()));
    }
    RasterImage out = image;
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            if (mask.at(x, y)) continue;
            for (int c = 0; c < image.channels(); ++c) out.at(x, y, c) = 0;
        }
    }
    return out;
}

BinaryMask inner_boundary(const BinaryMask& mask) {
    BinaryMask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            if (!mask.get_or_background(x - 1, y) || !mask.get_or_background(x + 1, y) ||
                !mask.get_or_background(x, y - 1) || !mask.get_or_background(x, y + 1)) {
                out.set(x, y);
            }
        }
    }
    return out;
}

BoundingBox bounding_box(const BinaryMask& mask) {
    BoundingBox box{mask.height(), mask.width(), -1, -1};
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            box.top = std::min(box.top, y);
            box.bottom = std::max(box.bottom, y);
            box.left = std::min(box.left, x);
            box.right = std::max(box.right, x);
        }
    }
    if (box.bottom < 0) return BoundingBox{};
    return box;
}

std::size_t count_components(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<std::uint8_t> seen(mask.size(), 0);
    std::vector<std::pair<int, int>> stack;
    std::size_t components = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (!mask.at(x, y) || seen[i]) continue;
            ++components;
            seen[i] = 1;
            stack.emplace_back(x, y);
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx;
                        const int ny = cy + dy;
                        if (!mask.in_bounds(nx, ny) || !mask.at(nx, ny)) continue;
                        const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
                        if (!seen[j]) {
                            seen[j] = 1;
                            stack.emplace_back(nx, ny);
                        }
                    }
                }
            }
        }
    }
    return components;
}

}  // namespace liqd
