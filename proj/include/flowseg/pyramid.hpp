#pragma once

#include <vector>

#include "flowseg/raster.hpp"

namespace flowseg {

// Coarse-to-fine schedule for the variational solver.
struct PyramidConfig {
    int levels = 4;          // number of pyramid levels including the base
    double scale = 0.5;      // per-level size factor, must be in (0, 1)
    int warps_per_level = 2; // relinearization steps at each level
};

void validate_pyramid_config(const PyramidConfig& cfg);

// 5-tap binomial smoothing ([1 4 6 4 1]/16), separable, border-clamped.
Image gaussian_blur5(const Image& src);

// result[0] is the input; each following level is blurred then resized by
// `scale` (sizes rounded half away from zero). Throws ValidationError if any
// level would fall below 8x8.
std::vector<Image> gaussian_pyramid(const Image& base, int levels, double scale);

} // namespace flowseg
