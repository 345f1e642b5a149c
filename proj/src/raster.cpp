#include "flowseg/raster.hpp"

#include <cmath>
#include <string>

namespace flowseg {

Image::Image(int w, int h, int c) : width(w), height(h), channels(c) {
    if (w <= 0 || h <= 0) throw ValidationError("image dimensions must be positive");
    if (c < 1 || c > 8) throw ValidationError("image channel count out of range: " + std::to_string(c));
    data.assign(static_cast<size_t>(w) * h * c, 0.0f);
}

void validate_image(const Image& img, const char* what) {
    if (img.width <= 0 || img.height <= 0 || img.channels <= 0)
        throw ValidationError(std::string(what) + " has empty dimensions");
    if (img.data.size() != static_cast<size_t>(img.width) * img.height * img.channels)
        throw ValidationError(std::string(what) + " buffer size does not match dimensions");
    for (float v : img.data) {
        if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
            throw ValidationError(std::string(what) + " contains samples outside [0, 1]");
    }
}

LabelMask::LabelMask(int w, int h) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw ValidationError("mask dimensions must be positive");
    labels.assign(static_cast<size_t>(w) * h, 0);
}

FlowField::FlowField(int w, int h) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw ValidationError("flow dimensions must be positive");
    u.assign(static_cast<size_t>(w) * h, 0.0f);
    v.assign(static_cast<size_t>(w) * h, 0.0f);
}

void validate_flow(const FlowField& f, const char* what) {
    if (f.width <= 0 || f.height <= 0)
        throw ValidationError(std::string(what) + " has empty dimensions");
    if (f.u.size() != f.pixel_count() || f.v.size() != f.pixel_count())
        throw ValidationError(std::string(what) + " buffer size does not match dimensions");
    for (size_t i = 0; i < f.u.size(); ++i) {
        if (!std::isfinite(f.u[i]) || !std::isfinite(f.v[i]))
            throw ValidationError(std::string(what) + " contains non-finite components");
    }
}

} // namespace flowseg
