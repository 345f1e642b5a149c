#include "flowseg/resample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flowseg {

namespace {

void check_nonempty(int w, int h, const char* what) {
    if (w <= 0 || h <= 0) throw ValidationError(std::string(what) + ": empty input");
}

void check_target(int w, int h) {
    if (w <= 0 || h <= 0) throw ValidationError("resize target must be at least 1x1");
}

// Source coordinate for output index i under the half-pixel-center convention.
inline double src_coord(int i, double scale) { return (i + 0.5) * scale - 0.5; }

} // namespace

Image resize_bilinear(const Image& src, int out_w, int out_h) {
    check_nonempty(src.width, src.height, "resize_bilinear");
    check_target(out_w, out_h);

    Image out(out_w, out_h, src.channels);
    const double sx = static_cast<double>(src.width) / out_w;
    const double sy = static_cast<double>(src.height) / out_h;
    const int c = src.channels;

#pragma omp parallel for schedule(static)
    for (int y = 0; y < out_h; ++y) {
        double fy = src_coord(y, sy);
        int y0 = static_cast<int>(std::floor(fy));
        double wy = fy - y0;
        int y1 = y0 + 1;
        y0 = std::clamp(y0, 0, src.height - 1);
        y1 = std::clamp(y1, 0, src.height - 1);
        for (int x = 0; x < out_w; ++x) {
            double fx = src_coord(x, sx);
            int x0 = static_cast<int>(std::floor(fx));
            double wx = fx - x0;
            int x1 = x0 + 1;
            x0 = std::clamp(x0, 0, src.width - 1);
            x1 = std::clamp(x1, 0, src.width - 1);
            for (int ch = 0; ch < c; ++ch) {
                double top = src.at(x0, y0, ch) + wx * (src.at(x1, y0, ch) - src.at(x0, y0, ch));
                double bot = src.at(x0, y1, ch) + wx * (src.at(x1, y1, ch) - src.at(x0, y1, ch));
                out.at(x, y, ch) = static_cast<float>(top + wy * (bot - top));
            }
        }
    }
    return out;
}

LabelMask resize_nearest(const LabelMask& src, int out_w, int out_h) {
    check_nonempty(src.width, src.height, "resize_nearest");
    check_target(out_w, out_h);

    LabelMask out(out_w, out_h);
    const double sx = static_cast<double>(src.width) / out_w;
    const double sy = static_cast<double>(src.height) / out_h;

#pragma omp parallel for schedule(static)
    for (int y = 0; y < out_h; ++y) {
        int iy = std::clamp(static_cast<int>(std::floor((y + 0.5) * sy)), 0, src.height - 1);
        for (int x = 0; x < out_w; ++x) {
            int ix = std::clamp(static_cast<int>(std::floor((x + 0.5) * sx)), 0, src.width - 1);
            out.at(x, y) = src.at(ix, iy);
        }
    }
    return out;
}

namespace {

void check_crop(int sw, int sh, int x, int y, int w, int h) {
    if (w <= 0 || h <= 0) throw ValidationError("crop size must be positive");
    if (x < 0 || y < 0 || x + w > sw || y + h > sh)
        throw ValidationError("crop rectangle out of bounds: (" + std::to_string(x) + "," +
                              std::to_string(y) + "," + std::to_string(w) + "," +
                              std::to_string(h) + ") in " + std::to_string(sw) + "x" +
                              std::to_string(sh));
}

} // namespace

Image crop(const Image& src, int x, int y, int w, int h) {
    check_crop(src.width, src.height, x, y, w, h);
    Image out(w, h, src.channels);
    for (int oy = 0; oy < h; ++oy)
        for (int ox = 0; ox < w; ++ox)
            for (int c = 0; c < src.channels; ++c)
                out.at(ox, oy, c) = src.at(x + ox, y + oy, c);
    return out;
}

LabelMask crop(const LabelMask& src, int x, int y, int w, int h) {
    check_crop(src.width, src.height, x, y, w, h);
    LabelMask out(w, h);
    for (int oy = 0; oy < h; ++oy)
        for (int ox = 0; ox < w; ++ox)
            out.at(ox, oy) = src.at(x + ox, y + oy);
    return out;
}

FlowField crop(const FlowField& src, int x, int y, int w, int h) {
    check_crop(src.width, src.height, x, y, w, h);
    FlowField out(w, h);
    for (int oy = 0; oy < h; ++oy)
        for (int ox = 0; ox < w; ++ox) {
            out.u[out.idx(ox, oy)] = src.u[src.idx(x + ox, y + oy)];
            out.v[out.idx(ox, oy)] = src.v[src.idx(x + ox, y + oy)];
        }
    return out;
}

Image luminance(const Image& src) {
    check_nonempty(src.width, src.height, "luminance");
    if (src.channels == 1) return src;
    if (src.channels != 3)
        throw ValidationError("luminance expects 1 or 3 channels, got " +
                              std::to_string(src.channels));
    Image out(src.width, src.height, 1);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x)
            out.at(x, y, 0) = static_cast<float>(0.299 * src.at(x, y, 0) +
                                                 0.587 * src.at(x, y, 1) +
                                                 0.114 * src.at(x, y, 2));
    return out;
}

float sample_bilinear_clamped(const Image& img, double x, double y, int c) {
    int x0 = static_cast<int>(std::floor(x));
    int y0 = static_cast<int>(std::floor(y));
    double wx = x - x0;
    double wy = y - y0;
    int x1 = std::clamp(x0 + 1, 0, img.width - 1);
    int y1 = std::clamp(y0 + 1, 0, img.height - 1);
    x0 = std::clamp(x0, 0, img.width - 1);
    y0 = std::clamp(y0, 0, img.height - 1);
    double top = img.at(x0, y0, c) + wx * (img.at(x1, y0, c) - img.at(x0, y0, c));
    double bot = img.at(x0, y1, c) + wx * (img.at(x1, y1, c) - img.at(x0, y1, c));
    return static_cast<float>(top + wy * (bot - top));
}

Image warp_by_flow(const Image& src, const FlowField& flow) {
    if (src.channels != 1) throw ValidationError("warp_by_flow expects a single-channel image");
    if (src.width != flow.width || src.height != flow.height)
        throw ValidationError("warp_by_flow: image and flow dimensions differ");
    Image out(src.width, src.height, 1);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x) {
            size_t i = flow.idx(x, y);
            out.at(x, y, 0) = sample_bilinear_clamped(src, x + static_cast<double>(flow.u[i]),
                                                      y + static_cast<double>(flow.v[i]), 0);
        }
    return out;
}

} // namespace flowseg
