#include "flowseg/flow_ops.hpp"

#include <cmath>

#include "flowseg/resample.hpp"

namespace flowseg {

FlowField rescale_flow(const FlowField& src, int out_w, int out_h) {
    if (src.width <= 0 || src.height <= 0) throw ValidationError("rescale_flow: empty input");
    if (out_w <= 0 || out_h <= 0) throw ValidationError("rescale_flow: target must be >= 1x1");

    // Resample each plane like a single-channel image, then scale the vector
    // components by the grid ratio.
    Image planes(src.width, src.height, 2);
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x) {
            planes.at(x, y, 0) = src.u[src.idx(x, y)];
            planes.at(x, y, 1) = src.v[src.idx(x, y)];
        }
    const Image resized = resize_bilinear(planes, out_w, out_h);

    const double su = static_cast<double>(out_w) / src.width;
    const double sv = static_cast<double>(out_h) / src.height;
    FlowField out(out_w, out_h);
    for (int y = 0; y < out_h; ++y)
        for (int x = 0; x < out_w; ++x) {
            out.u[out.idx(x, y)] = static_cast<float>(resized.at(x, y, 0) * su);
            out.v[out.idx(x, y)] = static_cast<float>(resized.at(x, y, 1) * sv);
        }
    return out;
}

void validate_pairing(const FlowPairing& p) {
    if (p.offset < 1) throw ValidationError("pairing offset must be >= 1");
}

std::optional<size_t> reference_index(size_t index, size_t clip_size, const FlowPairing& p) {
    validate_pairing(p);
    if (index >= clip_size) throw ValidationError("frame index outside clip");
    const size_t off = static_cast<size_t>(p.offset);
    if (index >= off) return index - off;
    switch (p.boundary) {
        case BoundaryPolicy::ZeroFlow: return std::nullopt;
        case BoundaryPolicy::ClampToFirst: return 0; // self-pair at index 0 yields near-zero flow
    }
    return std::nullopt;
}

FramePair pair_frames(std::span<const std::string> clip, size_t index, const FlowPairing& p) {
    if (clip.empty()) throw ValidationError("pair_frames: empty clip");
    const auto ref = reference_index(index, clip.size(), p);
    FramePair out;
    out.current = clip[index];
    if (ref) out.reference = clip[*ref];
    return out;
}

} // namespace flowseg
