#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace liqd {

/// One RGB sample in real arithmetic. Channels are expected in [0, 255].
struct Rgb {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;
};

/// Row-major 8-bit raster, either grayscale (1 channel) or interleaved RGB (3).
class RasterImage {
public:
    RasterImage(int width, int height, int channels, std::uint8_t fill = 0);
    RasterImage(int width, int height, int channels, std::vector<std::uint8_t> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    bool is_gray() const noexcept { return channels_ == 1; }
    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }
    bool same_shape(const RasterImage& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    std::uint8_t at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }
    std::uint8_t& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }

    /// RGB view of a pixel; grayscale images replicate the single channel.
    Rgb rgb(int x, int y) const noexcept;

    std::span<const std::uint8_t> data() const noexcept { return data_; }
    std::span<std::uint8_t> data() noexcept { return data_; }

    bool operator==(const RasterImage&) const = default;

private:
    std::size_t index(int x, int y, int c) const noexcept {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x)) * static_cast<std::size_t>(channels_) +
               static_cast<std::size_t>(c);
    }

    int width_;
    int height_;
    int channels_;
    std::vector<std::uint8_t> data_;
};

/// Weights of the fused grayscale conversion. alpha weights the YUV-derived
/// intensity, beta the normalized-rgb intensity; alpha + beta must equal 1.
class GrayParams {
public:
    GrayParams() = default;
    GrayParams(double alpha, double beta);

    static GrayParams from_alpha(double alpha) { return GrayParams(alpha, 1.0 - alpha); }

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }

    bool operator==(const GrayParams&) const = default;

private:
    double alpha_ = 0.5;
    double beta_ = 0.5;
};

/// (R/3 + G/3 + B/3 + U + V) / 4 with Y = .299R + .587G + .114B,
/// U = .565(B - Y), V = .713(R - Y). Not clamped.
double intensity_i1_raw(const Rgb& px) noexcept;

/// intensity_i1_raw clamped to [0, 255].
double intensity_i1(const Rgb& px) noexcept;

/// Sum of each channel weighted by its share of R + G + B. Pure black maps to 0.
double intensity_i2(const Rgb& px) noexcept;

/// alpha * I1 + beta * I2 in real arithmetic, before storage rounding.
double fused_intensity(const Rgb& px, const GrayParams& params) noexcept;

/// Half-up rounding to the nearest 8-bit level, saturating at 0 and 255.
std::uint8_t round_to_u8(double value) noexcept;

/// Fused grayscale conversion of an RGB image. Throws std::invalid_argument for
/// single-channel input.
RasterImage to_grayscale(const RasterImage& image, const GrayParams& params = {});

}  // namespace liqd
