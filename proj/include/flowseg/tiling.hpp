#pragma once

#include <string>

#include "flowseg/raster.hpp"

namespace flowseg {

enum class BlendMode { Average, LinearFeather };

const char* blend_name(BlendMode b);
BlendMode parse_blend(const std::string& name);

struct TileRect {
    int x = 0, y = 0, w = 0, h = 0;
};

// Geometry for flow estimation on wide frames: two square crops of side
// min(w, h), one flush left and one flush right, each downscaled to
// tile_size^2 for estimation, then stitched side by side into a raster that
// keeps the source aspect ratio at tile resolution.
struct TilingPlan {
    int source_w = 0, source_h = 0;
    int side = 0;
    TileRect left, right;
    int tile_size = 0;
    int stitched_w = 0, stitched_h = 0;
    int right_offset = 0; // column where the right tile lands in the stitch
    BlendMode blend = BlendMode::LinearFeather;
};

// Landscape or square inputs only (w >= h). stitched_w = ceil(w * tile / side)
// so the right tile always fits; right_offset rounds half-up.
TilingPlan plan_tiles(int w, int h, int tile_size,
                      BlendMode blend = BlendMode::LinearFeather);

// Combines two tile_size^2 fields into the stitched raster. Overlap columns
// mix as left + weight * (right - left): weight 1/2 under Average, a linear
// ramp under LinearFeather, so agreeing tiles stitch seamlessly. Horizontal
// components are rescaled by (stitched_w * side) / (source_w * tile_size) to
// express them in stitched-pixel units; the factor is exactly 1 whenever
// stitched_w / tile_size equals source_w / side.
FlowField stitch(const FlowField& left, const FlowField& right, const TilingPlan& plan);

// Crops one square from the frame and downscales it to tile_size^2.
Image make_tile(const Image& frame, const TilingPlan& plan, bool right_tile);

} // namespace flowseg
