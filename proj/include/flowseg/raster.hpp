#pragma once

#include <cstdint>
#include <vector>

#include "flowseg/util.hpp"

namespace flowseg {

// Dense raster of float samples in [0, 1], row-major, channels interleaved:
// index = (y * width + x) * channels + c.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<float> data;

    Image() = default;
    Image(int w, int h, int c);

    float at(int x, int y, int c) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    float& at(int x, int y, int c) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    bool same_shape(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

// Throws ValidationError if any sample is non-finite or outside [0, 1].
void validate_image(const Image& img, const char* what = "image");

// Per-pixel class labels, row-major.
struct LabelMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> labels;

    LabelMask() = default;
    LabelMask(int w, int h);

    uint8_t at(int x, int y) const { return labels[static_cast<size_t>(y) * width + x]; }
    uint8_t& at(int x, int y) { return labels[static_cast<size_t>(y) * width + x]; }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

// Dense displacement field. u is the x-component and v the y-component of the
// per-pixel motion, in pixels, y pointing down. Planar storage, row-major.
struct FlowField {
    int width = 0;
    int height = 0;
    std::vector<float> u;
    std::vector<float> v;

    FlowField() = default;
    FlowField(int w, int h);

    size_t idx(int x, int y) const { return static_cast<size_t>(y) * width + x; }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

// Throws ValidationError on non-finite components.
void validate_flow(const FlowField& f, const char* what = "flow field");

} // namespace flowseg
