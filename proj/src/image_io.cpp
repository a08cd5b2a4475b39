#include "ghostbench/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <vector>

namespace ghostbench {

namespace {

bool has_suffix(const std::string& s, const char* suffix) {
    const std::size_t n = std::strlen(suffix);
    return s.size() >= n && s.compare(s.size() - n, n, suffix) == 0;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

int read_pnm_token(std::istream& in, const std::string& path) {
    // Skips whitespace and '#' comment lines between header fields.
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    if (c == EOF || !std::isdigit(c)) fail(path, "malformed PGM header");
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        if (value > 100000000) fail(path, "PGM header value out of range");
        c = in.get();
    }
    return value;
}

Image load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open file");
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '5') fail(path, "not a binary PGM (P5) file");
    const int width = read_pnm_token(in, path);
    const int height = read_pnm_token(in, path);
    const int maxval = read_pnm_token(in, path);
    if (width <= 0 || height <= 0) fail(path, "bad PGM dimensions");
    if (maxval != 255 && maxval != 65535) fail(path, "unsupported PGM maxval (want 255 or 65535)");
    // Exactly one whitespace byte separates the header from the raster.
    const std::size_t n = static_cast<std::size_t>(width) * height;
    Image image(width, height);
    if (maxval == 255) {
        std::vector<unsigned char> raw(n);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n) fail(path, "truncated PGM payload");
        for (std::size_t i = 0; i < n; ++i) image.data[i] = raw[i] / 255.0;
    } else {
        std::vector<unsigned char> raw(n * 2);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n * 2));
        if (static_cast<std::size_t>(in.gcount()) != n * 2) fail(path, "truncated PGM payload");
        for (std::size_t i = 0; i < n; ++i) {
            const unsigned v = (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
            image.data[i] = v / 65535.0;
        }
    }
    return image;
}

void save_pgm(const Image& image, const std::string& path, int bit_depth) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open file for writing");
    const int maxval = (bit_depth == 8) ? 255 : 65535;
    out << "P5\n" << image.width << " " << image.height << "\n" << maxval << "\n";
    if (bit_depth == 8) {
        std::vector<unsigned char> raw(image.data.size());
        for (std::size_t i = 0; i < image.data.size(); ++i)
            raw[i] = static_cast<unsigned char>(std::lround(image.data[i] * 255.0));
        out.write(reinterpret_cast<const char*>(raw.data()),
                  static_cast<std::streamsize>(raw.size()));
    } else {
        std::vector<unsigned char> raw(image.data.size() * 2);
        for (std::size_t i = 0; i < image.data.size(); ++i) {
            const auto v = static_cast<unsigned>(std::lround(image.data[i] * 65535.0));
            raw[2 * i] = static_cast<unsigned char>(v >> 8);
            raw[2 * i + 1] = static_cast<unsigned char>(v & 0xFF);
        }
        out.write(reinterpret_cast<const char*>(raw.data()),
                  static_cast<std::streamsize>(raw.size()));
    }
    if (!out) fail(path, "write failed");
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};

Image load_png(const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail(path, "cannot open file");
    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
        fail(path, "not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "libpng read error");
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    if (color_type != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "PNG is not grayscale");
    }
    if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);
    const int depth = png_get_bit_depth(png, info);

    const std::size_t rowbytes = png_get_rowbytes(png, info);
    std::vector<png_byte> raster(rowbytes * height);
    std::vector<png_bytep> rows(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = raster.data() + y * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Image image(static_cast<int>(width), static_cast<int>(height));
    const std::size_t n = image.data.size();
    if (depth == 8) {
        for (std::size_t i = 0; i < n; ++i) image.data[i] = raster[i] / 255.0;
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const unsigned v = (static_cast<unsigned>(raster[2 * i]) << 8) | raster[2 * i + 1];
            image.data[i] = v / 65535.0;
        }
    }
    return image;
}

void save_png(const Image& image, const std::string& path, int bit_depth) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail(path, "cannot open file for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        fail(path, "libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "libpng write error");
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), bit_depth, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const std::size_t n = image.data.size();
    if (bit_depth == 8) {
        std::vector<png_byte> raster(n);
        for (std::size_t i = 0; i < n; ++i)
            raster[i] = static_cast<png_byte>(std::lround(image.data[i] * 255.0));
        std::vector<png_bytep> rows(image.height);
        for (int y = 0; y < image.height; ++y)
            rows[y] = raster.data() + static_cast<std::size_t>(y) * image.width;
        png_write_image(png, rows.data());
    } else {
        std::vector<png_byte> raster(n * 2);
        for (std::size_t i = 0; i < n; ++i) {
            const auto v = static_cast<unsigned>(std::lround(image.data[i] * 65535.0));
            raster[2 * i] = static_cast<png_byte>(v >> 8);
            raster[2 * i + 1] = static_cast<png_byte>(v & 0xFF);
        }
        std::vector<png_bytep> rows(image.height);
        for (int y = 0; y < image.height; ++y)
            rows[y] = raster.data() + static_cast<std::size_t>(y) * image.width * 2;
        png_write_image(png, rows.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace

Image load_image(const std::string& path) {
    Image image;
    if (has_suffix(path, ".pgm")) {
        image = load_pgm(path);
    } else if (has_suffix(path, ".png")) {
        image = load_png(path);
    } else {
        // Fall back on content sniffing for extensionless paths.
        std::ifstream in(path, std::ios::binary);
        if (!in) fail(path, "cannot open file");
        char magic[2] = {0, 0};
        in.read(magic, 2);
        in.close();
        if (magic[0] == 'P' && magic[1] == '5') image = load_pgm(path);
        else if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P')
            image = load_png(path);
        else fail(path, "unsupported image format (want PGM P5 or grayscale PNG)");
    }
    validate_image(image);
    return image;
}

void save_image(const Image& image, const std::string& path, int bit_depth) {
    validate_image(image);
    if (bit_depth != 8 && bit_depth != 16)
        throw std::invalid_argument("save_image: bit depth must be 8 or 16");
    if (has_suffix(path, ".png")) save_png(image, path, bit_depth);
    else save_pgm(image, path, bit_depth);
}

} // namespace ghostbench
