#include "flowseg/tiling.hpp"

#include <cmath>

#include "flowseg/resample.hpp"

namespace flowseg {

const char* blend_name(BlendMode b) {
    return b == BlendMode::Average ? "average" : "feather";
}

BlendMode parse_blend(const std::string& name) {
    std::string n = util::lower(name);
    if (n == "average") return BlendMode::Average;
    if (n == "feather" || n == "linearfeather") return BlendMode::LinearFeather;
    throw ValidationError("unknown blend mode '" + name + "' (expected average or feather)");
}

TilingPlan plan_tiles(int w, int h, int tile_size, BlendMode blend) {
    if (w < h) throw ValidationError("tiling expects landscape or square frames (w >= h)");
    if (h <= 0) throw ValidationError("tiling: empty frame");
    if (w > 2 * h) throw ValidationError("tiling: two square crops cannot cover a frame wider than 2x its height");
    if (tile_size <= 0) throw ValidationError("tiling: tile size must be positive");

    TilingPlan p;
    p.source_w = w;
    p.source_h = h;
    p.side = h;
    p.left = {0, 0, h, h};
    p.right = {w - h, 0, h, h};
    p.tile_size = tile_size;
    p.stitched_h = tile_size;
    p.stitched_w = static_cast<int>(
        std::ceil(static_cast<double>(w) * tile_size / h - 1e-9));
    p.right_offset = static_cast<int>(
        std::floor(static_cast<double>(w - h) * tile_size / h + 0.5));
    p.blend = blend;
    return p;
}

Image make_tile(const Image& frame, const TilingPlan& plan, bool right_tile) {
    const TileRect& r = right_tile ? plan.right : plan.left;
    Image square = crop(frame, r.x, r.y, r.w, r.h);
    if (r.w == plan.tile_size) return square;
    return resize_bilinear(square, plan.tile_size, plan.tile_size);
}

FlowField stitch(const FlowField& left, const FlowField& right, const TilingPlan& plan) {
    const int tile = plan.tile_size;
    if (left.width != tile || left.height != tile || right.width != tile || right.height != tile)
        throw ValidationError("stitch: tiles must match the plan's tile size");

    // Horizontal unit fix-up: one stitched pixel spans source_w / stitched_w
    // source pixels, one tile pixel spans side / tile source pixels. The ceil
    // in stitched_w makes these differ by a fraction of a percent on frames
    // like 854x480; without the fix-up a constant field would not survive the
    // crop/stitch/rescale round trip.
    const double u_unit = static_cast<double>(plan.stitched_w) * plan.side /
                          (static_cast<double>(plan.source_w) * tile);

    FlowField out(plan.stitched_w, plan.stitched_h);
    const int overlap_lo = plan.right_offset;
    const int overlap_hi = tile; // columns [lo, hi) take both tiles
    for (int y = 0; y < plan.stitched_h; ++y) {
        for (int x = 0; x < plan.stitched_w; ++x) {
            const int rx = std::min(std::max(x - plan.right_offset, 0), tile - 1);
            double u, v;
            if (x < overlap_lo) {
                u = left.u[left.idx(x, y)];
                v = left.v[left.idx(x, y)];
            } else if (x >= overlap_hi) {
                u = right.u[right.idx(rx, y)];
                v = right.v[right.idx(rx, y)];
            } else {
                double wr = 0.5;
                if (plan.blend == BlendMode::LinearFeather)
                    wr = static_cast<double>(x - overlap_lo + 1) / (overlap_hi - overlap_lo + 1);
                const double ul = left.u[left.idx(x, y)];
                const double vl = left.v[left.idx(x, y)];
                u = ul + wr * (right.u[right.idx(rx, y)] - ul);
                v = vl + wr * (right.v[right.idx(rx, y)] - vl);
            }
            out.u[out.idx(x, y)] = static_cast<float>(u * u_unit);
            out.v[out.idx(x, y)] = static_cast<float>(v);
        }
    }
    return out;
}

} // namespace flowseg
