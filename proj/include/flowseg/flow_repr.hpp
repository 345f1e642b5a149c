#pragma once

#include <string>

#include "flowseg/raster.hpp"

namespace flowseg {

enum class EncodingKind { RGBof, XY, PC };

const char* encoding_name(EncodingKind k);
EncodingKind parse_encoding(const std::string& name);
int encoding_channels(EncodingKind k);

// How flow magnitude maps to color-wheel saturation. PerImageMax divides by
// the field's own maximum magnitude (floored at 1e-6); FixedCap divides by a
// caller-supplied cap so renders are comparable across frames.
struct NormalizationPolicy {
    enum class Mode { PerImageMax, FixedCap };
    Mode mode = Mode::PerImageMax;
    double max_px = 0.0;

    static NormalizationPolicy per_image_max() { return {}; }
    static NormalizationPolicy fixed_cap(double max_px);
};

void validate_policy(const NormalizationPolicy& n);

// One rendered flow input. XY and PC carry two planes, RGBof three; planes
// always match the source field's dimensions.
struct FlowEncoding {
    EncodingKind kind = EncodingKind::XY;
    Image planes;
    NormalizationPolicy norm;
};

// Plane 0 = u, plane 1 = v, both in pixel units. Lossless.
FlowEncoding flow_to_xy(const FlowField& f);
FlowField xy_to_flow(const FlowEncoding& e);

// Plane 0 = magnitude, plane 1 = angle in [0, 2*pi), atan2(v, u) with y down.
// Zero-magnitude pixels get angle 0.
FlowEncoding flow_to_polar(const FlowField& f);
FlowField polar_to_flow(const FlowEncoding& e);

// HSV wheel: hue = angle / 2*pi, saturation = min(magnitude / M, 1), value 1.
// A zero field renders pure white.
FlowEncoding flow_to_colorwheel(const FlowField& f, const NormalizationPolicy& n);

FlowEncoding encode_flow(const FlowField& f, EncodingKind k, const NormalizationPolicy& n);

} // namespace flowseg
