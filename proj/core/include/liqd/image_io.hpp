#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "liqd/imaging.hpp"

namespace liqd {

/// Raised for unreadable, malformed or unsupported image files. The message
/// always names the offending path.
class ImageIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads PNG or binary PGM/PPM (P5/P6, maxval 255). The format is chosen from
/// the file signature. Grayscale files load as 1 channel; color files as RGB
/// (PNG palette is expanded, alpha dropped). 16-bit data is rejected.
RasterImage read_image(const std::filesystem::path& path);

/// Writes PNG, or PGM/PPM when the extension is .pgm/.ppm/.pnm.
void write_image(const std::filesystem::path& path, const RasterImage& image);

void write_png(const std::filesystem::path& path, const RasterImage& image);
void write_pnm(const std::filesystem::path& path, const RasterImage& image);

}  // namespace liqd
