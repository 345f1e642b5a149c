#include "flowseg/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <vector>

#include "flowseg/util.hpp"

namespace flowseg {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) {
        if (mode[0] == 'r') throw MissingArtifactError("cannot open PNG: " + path.string());
        throw ValidationError("cannot open PNG for writing: " + path.string());
    }
    return f;
}

struct PngRead {
    png_structp png = nullptr;
    png_infop info = nullptr;

    PngRead() {
        png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (png) info = png_create_info_struct(png);
        if (!png || !info) throw ValidationError("libpng allocation failed");
    }
    ~PngRead() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct PngWrite {
    png_structp png = nullptr;
    png_infop info = nullptr;

    PngWrite() {
        png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (png) info = png_create_info_struct(png);
        if (!png || !info) throw ValidationError("libpng allocation failed");
    }
    ~PngWrite() { png_destroy_write_struct(&png, &info); }
};

void check_header(std::FILE* f, const std::filesystem::path& path) {
    uint8_t sig[8];
    if (std::fread(sig, 1, 8, f) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw ValidationError("not a PNG file: " + path.string());
    std::rewind(f);
}

// Reads rows into a byte matrix after the transforms set up by `configure`,
// which must leave the image at 8 bits per channel.
std::vector<std::vector<uint8_t>> read_rows(const std::filesystem::path& path, PngRead& ctx,
                                            int& width, int& height, int& channels,
                                            void (*configure)(png_structp, png_infop)) {
    auto file = open_file(path, "rb");
    check_header(file.get(), path);

    if (setjmp(png_jmpbuf(ctx.png)))
        throw ValidationError("failed to decode PNG: " + path.string());

    png_init_io(ctx.png, file.get());
    png_read_info(ctx.png, ctx.info);
    configure(ctx.png, ctx.info);
    png_read_update_info(ctx.png, ctx.info);

    width = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
    height = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
    channels = png_get_channels(ctx.png, ctx.info);
    if (png_get_bit_depth(ctx.png, ctx.info) != 8)
        throw ValidationError("unsupported PNG bit depth after decode: " + path.string());

    const size_t stride = png_get_rowbytes(ctx.png, ctx.info);
    std::vector<std::vector<uint8_t>> rows(height, std::vector<uint8_t>(stride));
    std::vector<png_bytep> ptrs(height);
    for (int y = 0; y < height; ++y) ptrs[y] = rows[y].data();
    png_read_image(ctx.png, ptrs.data());
    png_read_end(ctx.png, nullptr);
    return rows;
}

} // namespace

Image read_image_png(const std::filesystem::path& path) {
    PngRead ctx;
    int w, h, c;
    auto rows = read_rows(path, ctx, w, h, c, [](png_structp png, png_infop info) {
        png_set_strip_16(png);
        png_set_packing(png);
        if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
        if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
        png_set_strip_alpha(png);
        png_set_interlace_handling(png);
    });

    if (c != 1 && c != 3)
        throw ValidationError("unsupported PNG channel layout (" + std::to_string(c) +
                              " channels): " + path.string());
    Image img(w, h, c);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int ch = 0; ch < c; ++ch)
                img.at(x, y, ch) = static_cast<float>(rows[y][x * c + ch]) / 255.0f;
    return img;
}

LabelMask read_mask_png(const std::filesystem::path& path) {
    PngRead ctx;
    int w, h, c;
    // No palette expansion: the palette index IS the label.
    auto rows = read_rows(path, ctx, w, h, c, [](png_structp png, png_infop info) {
        const auto color = png_get_color_type(png, info);
        if (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_PALETTE)
            png_error(png, "mask must be grayscale or palette");
        if (png_get_bit_depth(png, info) == 16) png_error(png, "16-bit masks unsupported");
        png_set_packing(png);
        png_set_interlace_handling(png);
    });

    if (c != 1) throw ValidationError("mask PNG decoded to multiple channels: " + path.string());
    LabelMask mask(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) mask.at(x, y) = rows[y][x];
    return mask;
}

void write_image_png(const std::filesystem::path& path, const Image& img) {
    validate_image(img);
    if (img.channels != 1 && img.channels != 3)
        throw ValidationError("write_image_png expects 1 or 3 channels");
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());

    PngWrite ctx;
    auto file = open_file(path, "wb");
    if (setjmp(png_jmpbuf(ctx.png)))
        throw ValidationError("failed to encode PNG: " + path.string());

    png_init_io(ctx.png, file.get());
    png_set_IHDR(ctx.png, ctx.info, img.width, img.height, 8,
                 img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ctx.png, ctx.info);

    std::vector<uint8_t> row(static_cast<size_t>(img.width) * img.channels);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c) {
                const float v = img.at(x, y, c);
                const long q = std::lround(static_cast<double>(v) * 255.0);
                row[x * img.channels + c] = static_cast<uint8_t>(std::clamp(q, 0l, 255l));
            }
        png_write_row(ctx.png, row.data());
    }
    png_write_end(ctx.png, nullptr);
}

void write_mask_png(const std::filesystem::path& path, const LabelMask& mask) {
    if (mask.width <= 0 || mask.height <= 0) throw ValidationError("empty mask");
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());

    PngWrite ctx;
    auto file = open_file(path, "wb");
    if (setjmp(png_jmpbuf(ctx.png)))
        throw ValidationError("failed to encode PNG: " + path.string());

    png_init_io(ctx.png, file.get());
    png_set_IHDR(ctx.png, ctx.info, mask.width, mask.height, 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ctx.png, ctx.info);
    for (int y = 0; y < mask.height; ++y)
        png_write_row(ctx.png, const_cast<png_bytep>(mask.labels.data() +
                                                     static_cast<size_t>(y) * mask.width));
    png_write_end(ctx.png, nullptr);
}

} // namespace flowseg
