#include "liqd/image_io.hpp"

#include <png.h>

#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>
#include <vector>

namespace liqd {
namespace {

using FilePtr = std::unique_ptr<std::FILE, decltype(&std::fclose)>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr fp(std::fopen(path.c_str(), mode), &std::fclose);
    if (!fp) throw ImageIoError("cannot open '" + path.string() + "'");
    return fp;
}

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
    auto* what = static_cast<std::string*>(png_get_error_ptr(png));
    if (what) *what = msg;
    png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

RasterImage read_png(const std::filesystem::path& path) {
    FilePtr fp = open_file(path, "rb");
    std::string error;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
    if (!png) throw ImageIoError("libpng init failed for '" + path.string() + "'");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw ImageIoError("libpng init failed for '" + path.string() + "'");
    }

    // No object with a destructor may be created between setjmp and the last
    // libpng call; buffers are declared up front.
    std::vector<std::uint8_t> pixels;
    std::vector<png_bytep> rows;
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    volatile int channels = 0;
    int bit_depth = 0;
    volatile bool rejected_depth = false;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ImageIoError("corrupt PNG '" + path.string() + "': " + error);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    width = png_get_image_width(png, info);
    height = png_get_image_height(png, info);
    bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);
    if (bit_depth == 16) {
        rejected_depth = true;
    } else {
        if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
        if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
        if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
        png_set_strip_16(png);
        png_read_update_info(png, info);
        channels = png_get_channels(png, info);
        pixels.resize(static_cast<std::size_t>(width) * height * static_cast<std::size_t>(channels));
        rows.resize(height);
        for (png_uint_32 y = 0; y < height; ++y) {
            rows[y] = pixels.data() + static_cast<std::size_t>(y) * width * static_cast<std::size_t>(channels);
        }
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
    }
    png_destroy_read_struct(&png, &info, nullptr);

    if (rejected_depth) {
        throw ImageIoError("unsupported 16-bit PNG '" + path.string() + "': only 8-bit images are accepted");
    }
    if (channels != 1 && channels != 3) {
        throw ImageIoError("unsupported PNG channel layout in '" + path.string() + "'");
    }
    return RasterImage(static_cast<int>(width), static_cast<int>(height), channels, std::move(pixels));
}

// Reads the next whitespace-separated header token, skipping '#' comments.
std::string pnm_token(std::istream& in) {
    std::string token;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            if (!token.empty()) return token;
        } else {
            token.push_back(static_cast<char>(c));
        }
        c = in.get();
    }
    return token;
}

RasterImage read_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageIoError("cannot open '" + path.string() + "'");
    const std::string magic = pnm_token(in);
    int channels = 0;
    if (magic == "P5") channels = 1;
    else if (magic == "P6") channels = 3;
    else throw ImageIoError("unsupported PNM variant '" + magic + "' in '" + path.string() + "'");

    int width = 0;
    int height = 0;
    int maxval = 0;
    try {
        width = std::stoi(pnm_token(in));
        height = std::stoi(pnm_token(in));
        maxval = std::stoi(pnm_token(in));
    } catch (const std::exception&) {
        throw ImageIoError("malformed PNM header in '" + path.string() + "'");
    }
    if (maxval > 255) {
        throw ImageIoError("unsupported 16-bit PNM '" + path.string() + "': maxval " + std::to_string(maxval));
    }
    if (maxval != 255) {
        throw ImageIoError("unsupported PNM maxval " + std::to_string(maxval) + " in '" + path.string() + "'");
    }
    if (width < 1 || height < 1) throw ImageIoError("invalid PNM dimensions in '" + path.string() + "'");
    std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height * channels);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (in.gcount() != static_cast<std::streamsize>(data.size())) {
        throw ImageIoError("truncated PNM data in '" + path.string() + "'");
    }
    return RasterImage(width, height, channels, std::move(data));
}

bool has_pnm_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

}  // namespace

RasterImage read_image(const std::filesystem::path& path) {
    std::array<unsigned char, 8> signature{};
    {
        FilePtr fp = open_file(path, "rb");
        const std::size_t n = std::fread(signature.data(), 1, signature.size(), fp.get());
        if (n < 2) throw ImageIoError("file too short to be an image: '" + path.string() + "'");
        if (n == signature.size() && png_sig_cmp(signature.data(), 0, signature.size()) == 0) {
            return read_png(path);
        }
    }
    if (signature[0] == 'P') return read_pnm(path);
    throw ImageIoError("unrecognized image format: '" + path.string() + "'");
}

void write_png(const std::filesystem::path& path, const RasterImage& image) {
    FilePtr fp = open_file(path, "wb");
    std::string error;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
    if (!png) throw ImageIoError("libpng init failed for '" + path.string() + "'");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw ImageIoError("libpng init failed for '" + path.string() + "'");
    }
    const auto stride = static_cast<std::size_t>(image.width()) * static_cast<std::size_t>(image.channels());
    std::vector<png_const_bytep> rows(static_cast<std::size_t>(image.height()));
    for (int y = 0; y < image.height(); ++y) rows[static_cast<std::size_t>(y)] = image.data().data() + y * stride;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw ImageIoError("failed writing PNG '" + path.string() + "': " + error);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()), static_cast<png_uint_32>(image.height()), 8,
                 image.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, const_cast<png_bytepp>(rows.data()));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void write_pnm(const std::filesystem::path& path, const RasterImage& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ImageIoError("cannot open '" + path.string() + "' for writing");
    out << (image.channels() == 1 ? "P5" : "P6") << '\n'
        << image.width() << ' ' << image.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.data().data()), static_cast<std::streamsize>(image.data().size()));
    if (!out) throw ImageIoError("failed writing '" + path.string() + "'");
}

void write_image(const std::filesystem::path& path, const RasterImage& image) {
    if (has_pnm_extension(path)) write_pnm(path, image);
    else write_png(path, image);
}

}  // namespace liqd
