#pragma once

#include <optional>
#include <span>
#include <string>

#include "flowseg/raster.hpp"

namespace flowseg {

// Resamples the field to a new grid (bilinear, half-pixel centers) and scales
// the vector components by the grid ratio: u by out_w/in_w, v by out_h/in_h.
FlowField rescale_flow(const FlowField& src, int out_w, int out_h);

// What to do for frames too early in a clip to have a reference frame.
enum class BoundaryPolicy {
    ZeroFlow,     // no reference; callers emit an all-zero field
    ClampToFirst, // pair with the clip's first frame
};

struct FlowPairing {
    int offset = 1; // temporal distance to the reference frame, must be >= 1
    BoundaryPolicy boundary = BoundaryPolicy::ZeroFlow;
};

void validate_pairing(const FlowPairing& p);

// Reference position for the frame at `index` in a clip of `clip_size` frames.
// Returns nullopt when the policy is ZeroFlow and index < offset.
std::optional<size_t> reference_index(size_t index, size_t clip_size, const FlowPairing& p);

struct FramePair {
    std::string current;
    std::optional<std::string> reference;
};

// Id-level convenience over reference_index.
FramePair pair_frames(std::span<const std::string> clip, size_t index, const FlowPairing& p);

} // namespace flowseg
