#pragma once

#include "flowseg/raster.hpp"

namespace flowseg {

// All resampling uses half-pixel centers: output pixel i samples the input at
// (i + 0.5) * (in / out) - 0.5, clamped at the borders. Identity-size calls
// reproduce the input exactly.

Image resize_bilinear(const Image& src, int out_w, int out_h);
LabelMask resize_nearest(const LabelMask& src, int out_w, int out_h);

Image crop(const Image& src, int x, int y, int w, int h);
LabelMask crop(const LabelMask& src, int x, int y, int w, int h);
FlowField crop(const FlowField& src, int x, int y, int w, int h);

// Rec.601 luma: 0.299 R + 0.587 G + 0.114 B. Single-channel input passes
// through unchanged; other channel counts are rejected.
Image luminance(const Image& src);

// Clamped bilinear sample of one channel at a fractional position.
float sample_bilinear_clamped(const Image& img, double x, double y, int c);

// out(x, y) = src(x + u, y + v), bilinear, border-clamped. Used by the
// warping-based solver; src must be single-channel.
Image warp_by_flow(const Image& src, const FlowField& flow);

} // namespace flowseg
