#include "flowseg/flo_io.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "flowseg/util.hpp"

namespace flowseg {

namespace {

constexpr float kFloMagic = 202021.25f; // the bytes "PIEH" as a little-endian float
constexpr int kMaxDim = 99999;

} // namespace

std::vector<uint8_t> encode_flo(const FlowField& f) {
    validate_flow(f, "flo payload");
    std::vector<uint8_t> out;
    out.reserve(12 + f.pixel_count() * 8);
    util::put_f32le(out, kFloMagic);
    util::put_i32le(out, f.width);
    util::put_i32le(out, f.height);
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x) {
            util::put_f32le(out, f.u[f.idx(x, y)]);
            util::put_f32le(out, f.v[f.idx(x, y)]);
        }
    return out;
}

FlowField decode_flo(std::span<const uint8_t> bytes) {
    util::ByteReader r{bytes.data(), bytes.size()};
    float magic;
    try {
        magic = r.f32le();
    } catch (const ValidationError&) {
        throw ValidationError("flo: file too short for header");
    }
    if (magic != kFloMagic)
        throw ValidationError("flo: wrong magic number (got " + std::to_string(magic) + ")");
    const int32_t w = r.i32le();
    const int32_t h = r.i32le();
    if (w <= 0 || h <= 0 || w > kMaxDim || h > kMaxDim)
        throw ValidationError("flo: absurd dimensions " + std::to_string(w) + "x" +
                              std::to_string(h));
    const size_t expect = 12 + static_cast<size_t>(w) * h * 8;
    if (bytes.size() < expect) throw ValidationError("flo: truncated payload");
    if (bytes.size() > expect) throw ValidationError("flo: trailing bytes after payload");

    FlowField f(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            float u = r.f32le();
            float v = r.f32le();
            if (!std::isfinite(u) || !std::isfinite(v))
                throw ValidationError("flo: non-finite component at (" + std::to_string(x) + "," +
                                      std::to_string(y) + ")");
            f.u[f.idx(x, y)] = u;
            f.v[f.idx(x, y)] = v;
        }
    return f;
}

void write_flo(const std::filesystem::path& path, const FlowField& f) {
    util::write_file_bytes(path, encode_flo(f));
}

FlowField read_flo(const std::filesystem::path& path) {
    const auto bytes = util::read_file_bytes(path);
    try {
        return decode_flo(bytes);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

} // namespace flowseg
