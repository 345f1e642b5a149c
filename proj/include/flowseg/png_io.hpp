#pragma once

#include <filesystem>

#include "flowseg/raster.hpp"

namespace flowseg {

// PNG is the only raster format handled. Images load as float samples in
// [0, 1] (8-bit values divided by 255); 16-bit files are reduced to 8 bits,
// palette files are expanded to RGB, alpha is dropped.
Image read_image_png(const std::filesystem::path& path);

// Masks keep raw label values: 8-bit grayscale pixels or palette indices.
// Other layouts are rejected so label ids are never silently remapped.
LabelMask read_mask_png(const std::filesystem::path& path);

// Writes 8-bit grayscale (1 channel) or RGB (3 channels); samples are
// round(v * 255) clamped to [0, 255].
void write_image_png(const std::filesystem::path& path, const Image& img);

// Writes labels as 8-bit grayscale values.
void write_mask_png(const std::filesystem::path& path, const LabelMask& mask);

} // namespace flowseg
