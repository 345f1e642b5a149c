#include <doctest.h>

#include <cmath>

#include "flowseg/flow_repr.hpp"
#include "flowseg/util.hpp"

using namespace flowseg;

namespace {

FlowField random_flow(uint64_t seed, int w, int h, double mag) {
    FlowField f(w, h);
    util::Rng rng(seed);
    for (float& v : f.u) v = static_cast<float>(rng.uniform(-mag, mag));
    for (float& v : f.v) v = static_cast<float>(rng.uniform(-mag, mag));
    return f;
}

FlowField single(float u, float v) {
    FlowField f(1, 1);
    f.u[0] = u;
    f.v[0] = v;
    return f;
}

void check_rgb(const FlowField& f, const NormalizationPolicy& n, float r, float g, float b) {
    const FlowEncoding e = flow_to_colorwheel(f, n);
    CHECK(e.planes.at(0, 0, 0) == doctest::Approx(r).epsilon(1e-6));
    CHECK(e.planes.at(0, 0, 1) == doctest::Approx(g).epsilon(1e-6));
    CHECK(e.planes.at(0, 0, 2) == doctest::Approx(b).epsilon(1e-6));
}

} // namespace

TEST_CASE("encoding names and channel counts") {
    CHECK(std::string(encoding_name(EncodingKind::RGBof)) == "rgbof");
    CHECK(std::string(encoding_name(EncodingKind::XY)) == "xy");
    CHECK(std::string(encoding_name(EncodingKind::PC)) == "pc");
    CHECK(parse_encoding("RGBof") == EncodingKind::RGBof);
    CHECK(parse_encoding(" xy ") == EncodingKind::XY);
    CHECK_THROWS_AS(parse_encoding("hsv"), ValidationError);
    CHECK(encoding_channels(EncodingKind::RGBof) == 3);
    CHECK(encoding_channels(EncodingKind::XY) == 2);
    CHECK(encoding_channels(EncodingKind::PC) == 2);
}

TEST_CASE("xy encoding is lossless") {
    const FlowField f = random_flow(1, 11, 7, 30.0);
    const FlowEncoding e = flow_to_xy(f);
    REQUIRE(e.planes.channels == 2);
    const FlowField back = xy_to_flow(e);
    CHECK(back.u == f.u);
    CHECK(back.v == f.v);
}

TEST_CASE("polar angle lies in [0, 2pi) and zero vectors get angle zero") {
    const FlowField f = random_flow(2, 9, 9, 10.0);
    const FlowEncoding e = flow_to_polar(f);
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 9; ++x) {
            const float ang = e.planes.at(x, y, 1);
            CHECK(ang >= 0.0f);
            CHECK(ang < 2.0f * static_cast<float>(M_PI));
        }
    const FlowEncoding z = flow_to_polar(single(0.0f, 0.0f));
    CHECK(z.planes.at(0, 0, 0) == 0.0f);
    CHECK(z.planes.at(0, 0, 1) == 0.0f);
}

TEST_CASE("polar round-trip error stays under the float32 quantization budget") {
    double worst64 = 0.0, worst32 = 0.0;
    for (uint64_t seed : {3u, 4u, 5u}) {
        const FlowField f64 = random_flow(seed, 16, 16, 64.0);
        const FlowField b64 = polar_to_flow(flow_to_polar(f64));
        for (size_t i = 0; i < f64.u.size(); ++i) {
            worst64 = std::max(worst64, static_cast<double>(std::abs(f64.u[i] - b64.u[i])));
            worst64 = std::max(worst64, static_cast<double>(std::abs(f64.v[i] - b64.v[i])));
        }
        const FlowField f32 = random_flow(seed + 10, 16, 16, 32.0);
        const FlowField b32 = polar_to_flow(flow_to_polar(f32));
        for (size_t i = 0; i < f32.u.size(); ++i) {
            worst32 = std::max(worst32, static_cast<double>(std::abs(f32.u[i] - b32.u[i])));
            worst32 = std::max(worst32, static_cast<double>(std::abs(f32.v[i] - b32.v[i])));
        }
    }
    CHECK(worst64 < 2e-5);
    CHECK(worst32 < 1e-5);
}

TEST_CASE("cardinal directions land on exact hues") {
    const auto n = NormalizationPolicy::per_image_max();
    // +x: hue 0 -> red; +y (down): hue 0.25 -> chartreuse; -x: hue 0.5 ->
    // cyan; -y: hue 0.75 -> violet. Full saturation, value 1.
    check_rgb(single(1.0f, 0.0f), n, 1.0f, 0.0f, 0.0f);
    check_rgb(single(0.0f, 1.0f), n, 0.5f, 1.0f, 0.0f);
    check_rgb(single(-1.0f, 0.0f), n, 0.0f, 1.0f, 1.0f);
    check_rgb(single(0.0f, -1.0f), n, 0.5f, 0.0f, 1.0f);
}

TEST_CASE("colorwheel frozen samples") {
    const auto n = NormalizationPolicy::per_image_max();
    check_rgb(single(0.0f, 0.0f), n, 1.0f, 1.0f, 1.0f);
    check_rgb(single(1.0f, 1.0f), n, 1.0f, 0.75f, 0.0f);
    check_rgb(single(0.5f, 0.0f), NormalizationPolicy::fixed_cap(1.0), 1.0f, 0.5f, 0.5f);
}

TEST_CASE("saturation saturates at the cap") {
    const auto e = flow_to_colorwheel(single(8.0f, 0.0f), NormalizationPolicy::fixed_cap(2.0));
    CHECK(e.planes.at(0, 0, 0) == doctest::Approx(1.0f));
    CHECK(e.planes.at(0, 0, 1) == doctest::Approx(0.0f));
    CHECK(e.planes.at(0, 0, 2) == doctest::Approx(0.0f));
}

TEST_CASE("per-image-max render is invariant under power-of-two scaling") {
    const FlowField f = random_flow(6, 12, 10, 5.0);
    FlowField scaled = f;
    for (float& v : scaled.u) v *= 4.0f;
    for (float& v : scaled.v) v *= 4.0f;
    const auto n = NormalizationPolicy::per_image_max();
    const FlowEncoding a = flow_to_colorwheel(f, n);
    const FlowEncoding b = flow_to_colorwheel(scaled, n);
    CHECK(a.planes.data == b.planes.data);
}

TEST_CASE("encode_flow dispatches on kind") {
    const FlowField f = random_flow(7, 6, 6, 3.0);
    CHECK(encode_flow(f, EncodingKind::XY, NormalizationPolicy::per_image_max()).planes.channels ==
          2);
    CHECK(encode_flow(f, EncodingKind::PC, NormalizationPolicy::per_image_max()).planes.channels ==
          2);
    CHECK(
        encode_flow(f, EncodingKind::RGBof, NormalizationPolicy::per_image_max()).planes.channels ==
        3);
}

TEST_CASE("normalization policy validation") {
    CHECK_NOTHROW(validate_policy(NormalizationPolicy::per_image_max()));
    CHECK_NOTHROW(validate_policy(NormalizationPolicy::fixed_cap(3.0)));
    CHECK_THROWS_AS(NormalizationPolicy::fixed_cap(0.0), ValidationError);
    NormalizationPolicy bad;
    bad.mode = NormalizationPolicy::Mode::FixedCap;
    bad.max_px = 0.0;
    CHECK_THROWS_AS(validate_policy(bad), ValidationError);
}
