#pragma once

#include <cstdint>
#include <optional>

#include "flowseg/raster.hpp"

namespace flowseg {

struct ElasticParams {
    double alpha_px = 8.0; // displacement amplitude after blurring
    double sigma_px = 4.0; // Gaussian smoothing of the raw noise grid
};

// One sampled geometric transform. The spatial map is
//   p' = C + R(rotation) * scale * M(flips) * (p - C)
// about the raster center C, y pointing down. Elastic deformation, when
// present, perturbs the sampling grid on top of that. The family is geometric
// only; photometric knobs have no representation here on purpose.
struct GeomTransform {
    double rotation = 0.0; // radians in [-pi, pi]
    double scale = 1.0;
    bool hflip = false;
    bool vflip = false;
    std::optional<ElasticParams> elastic;
    uint64_t elastic_seed = 0;
};

void validate_transform(const GeomTransform& t);

struct AugmentRanges {
    double rot_prob = 0.2;
    double rot_max_rad = 0.5235987755982988; // 30 degrees
    double scale_prob = 0.2;
    double scale_lo = 0.7;
    double scale_hi = 1.4;
    double mirror_prob = 0.5; // per axis
    double elastic_prob = 0.2;
    ElasticParams elastic;
    bool elastic_on_flow = true; // resample flow planes under elastic warps

    static AugmentRanges disabled();
};

void validate_ranges(const AugmentRanges& r);

// Deterministic per seed; each component is drawn from its own derived stream
// so toggling one probability never shifts the others.
GeomTransform sample_transform(uint64_t seed, const AugmentRanges& r);

// Inverse-warp resampling about the raster center. Images sample bilinearly
// with zero fill outside the source; masks sample nearest with background
// fill; flow resamples its planes like an image and then applies the
// transform's linear part to each vector. Elastic warps move flow samples
// without reorienting them (set elastic_on_flow to false to skip even that).
Image apply_to_image(const GeomTransform& t, const Image& img);
LabelMask apply_to_mask(const GeomTransform& t, const LabelMask& mask);
FlowField apply_to_flow(const GeomTransform& t, const FlowField& f, bool elastic_on_flow = true);

struct AugmentedSample {
    Image image;
    LabelMask mask;
    std::optional<FlowField> flow;
    GeomTransform transform;
    bool elastic_flow_approx = false; // flow planes moved under an elastic warp
};

AugmentedSample augment_sample(const GeomTransform& t, const Image& img, const LabelMask& mask,
                               const FlowField* flow, bool elastic_on_flow);

} // namespace flowseg
