#include "liqd/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace liqd {

RasterImage::RasterImage(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
    if (width < 1 || height < 1) throw std::invalid_argument("image dimensions must be >= 1");
    if (channels != 1 && channels != 3) throw std::invalid_argument("image must have 1 or 3 channels");
    data_.assign(pixel_count() * static_cast<std::size_t>(channels), fill);
}

RasterImage::RasterImage(int width, int height, int channels, std::vector<std::uint8_t> data)
    : RasterImage(width, height, channels) {
    if (data.size() != data_.size()) {
        throw std::invalid_argument("image data length " + std::to_string(data.size()) +
                                    " does not match " + std::to_string(data_.size()));
    }
    data_ = std::move(data);
}

Rgb RasterImage::rgb(int x, int y) const noexcept {
    if (channels_ == 1) {
        const double v = at(x, y);
        return {v, v, v};
    }
    return {static_cast<double>(at(x, y, 0)), static_cast<double>(at(x, y, 1)),
            static_cast<double>(at(x, y, 2))};
}

GrayParams::GrayParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
    if (!(alpha >= 0.0 && alpha <= 1.0) || !(beta >= 0.0 && beta <= 1.0)) {
        throw std::invalid_argument("gray weights must lie in [0, 1]");
    }
    if (std::abs(alpha + beta - 1.0) > 1e-12) {
        throw std::invalid_argument("gray weights must satisfy alpha + beta = 1");
    }
}

double intensity_i1_raw(const Rgb& px) noexcept {
    const double y = 0.299 * px.r + 0.587 * px.g + 0.114 * px.b;
    const double u = 0.565 * (px.b - y);
    const double v = 0.713 * (px.r - y);
    return (px.r / 3.0 + px.g / 3.0 + px.b / 3.0 + u + v) / 4.0;
}

double intensity_i1(const Rgb& px) noexcept {
    return std::clamp(intensity_i1_raw(px), 0.0, 255.0);
}

double intensity_i2(const Rgb& px) noexcept {
    const double sum = px.r + px.g + px.b;
    if (sum <= 0.0) return 0.0;
    // r/(r+g+b) * R + ... written over a common denominator; exact for gray pixels.
    return (px.r * px.r + px.g * px.g + px.b * px.b) / sum;
}

double fused_intensity(const Rgb& px, const GrayParams& params) noexcept {
    return params.alpha() * intensity_i1(px) + params.beta() * intensity_i2(px);
}

std::uint8_t round_to_u8(double value) noexcept {
    const double r = std::floor(value + 0.5);
    return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

RasterImage to_grayscale(const RasterImage& image, const GrayParams& params) {
    if (image.channels() != 3) {
        throw std::invalid_argument("to_grayscale expects a 3-channel RGB image");
    }
    RasterImage out(image.width(), image.height(), 1);
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            out.at(x, y) = round_to_u8(fused_intensity(image.rgb(x, y), params));
        }
    }
    return out;
}

}  // namespace liqd
