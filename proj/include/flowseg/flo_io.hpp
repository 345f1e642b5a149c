#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "flowseg/raster.hpp"

namespace flowseg {

// Two-plane float field container, Middlebury layout: the 4 bytes "PIEH"
// (which read as the little-endian float 202021.25), int32 width, int32
// height, then row-major interleaved (u, v) float32 pairs, all little-endian.

std::vector<uint8_t> encode_flo(const FlowField& f);
FlowField decode_flo(std::span<const uint8_t> bytes);

void write_flo(const std::filesystem::path& path, const FlowField& f);
FlowField read_flo(const std::filesystem::path& path);

} // namespace flowseg
