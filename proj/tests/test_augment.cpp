#include <doctest.h>

#include <cmath>

#include "flowseg/augment.hpp"
#include "flowseg/util.hpp"

using namespace flowseg;

namespace {

Image random_image(uint64_t seed, int w, int h, int c) {
    Image img(w, h, c);
    util::Rng rng(seed);
    for (float& v : img.data) v = static_cast<float>(rng.uniform());
    return img;
}

LabelMask random_mask(uint64_t seed, int w, int h) {
    LabelMask m(w, h);
    util::Rng rng(seed);
    for (uint8_t& v : m.labels) v = static_cast<uint8_t>(rng.uniform_int(0, 2));
    return m;
}

GeomTransform rot(double radians) {
    GeomTransform t;
    t.rotation = radians;
    return t;
}

} // namespace

TEST_CASE("identity transform reproduces inputs exactly") {
    const GeomTransform id;
    const Image img = random_image(1, 9, 7, 3);
    const LabelMask mask = random_mask(2, 9, 7);
    FlowField f(9, 7);
    util::Rng rng(3);
    for (float& v : f.u) v = static_cast<float>(rng.uniform(-2.0, 2.0));
    for (float& v : f.v) v = static_cast<float>(rng.uniform(-2.0, 2.0));

    CHECK(apply_to_image(id, img).data == img.data);
    CHECK(apply_to_mask(id, mask).labels == mask.labels);
    const FlowField fi = apply_to_flow(id, f);
    CHECK(fi.u == f.u);
    CHECK(fi.v == f.v);
}

TEST_CASE("horizontal mirror is an exact involution") {
    GeomTransform t;
    t.hflip = true;
    const Image img = random_image(4, 10, 6, 3);
    const Image once = apply_to_image(t, img);
    CHECK(once.data != img.data);
    CHECK(apply_to_image(t, once).data == img.data);

    const LabelMask mask = random_mask(5, 10, 6);
    CHECK(apply_to_mask(t, apply_to_mask(t, mask)).labels == mask.labels);
}

TEST_CASE("mirror flips the u component sign") {
    GeomTransform t;
    t.hflip = true;
    FlowField f(4, 3);
    std::fill(f.u.begin(), f.u.end(), 1.5f);
    std::fill(f.v.begin(), f.v.end(), 0.5f);
    const FlowField out = apply_to_flow(t, f);
    for (size_t i = 0; i < out.u.size(); ++i) {
        CHECK(out.u[i] == -1.5f);
        CHECK(out.v[i] == 0.5f);
    }
}

TEST_CASE("four quarter turns compose to the identity exactly") {
    const Image img = random_image(6, 8, 8, 3);
    const LabelMask mask = random_mask(7, 8, 8);
    const GeomTransform q = rot(M_PI / 2.0);
    Image i = img;
    LabelMask m = mask;
    for (int k = 0; k < 4; ++k) {
        i = apply_to_image(q, i);
        m = apply_to_mask(q, m);
    }
    CHECK(i.data == img.data);
    CHECK(m.labels == mask.labels);
}

TEST_CASE("quarter turn rotates flow vectors exactly") {
    FlowField f(6, 6);
    std::fill(f.u.begin(), f.u.end(), 2.0f);
    std::fill(f.v.begin(), f.v.end(), 0.0f);
    // Forward map with y down: a +90 degree rotation sends +x to +y.
    const FlowField out = apply_to_flow(rot(M_PI / 2.0), f);
    for (size_t i = 0; i < out.u.size(); ++i) {
        CHECK(out.u[i] == 0.0f);
        CHECK(out.v[i] == 2.0f);
    }
}

TEST_CASE("small rotations keep mask labels from the source set") {
    const LabelMask mask = random_mask(8, 16, 16);
    const LabelMask out = apply_to_mask(rot(0.3), mask);
    for (uint8_t v : out.labels) CHECK(v <= 2);
}

TEST_CASE("scale about the center magnifies displacements") {
    GeomTransform t;
    t.scale = 2.0;
    FlowField f(8, 8);
    std::fill(f.u.begin(), f.u.end(), 1.0f);
    const FlowField out = apply_to_flow(t, f);
    // The linear part doubles each vector; the resample of a constant plane
    // leaves values alone.
    CHECK(out.u[out.idx(4, 4)] == doctest::Approx(2.0f).epsilon(1e-6));
    CHECK(out.v[out.idx(4, 4)] == doctest::Approx(0.0f).epsilon(1e-6));
}

TEST_CASE("sampling is deterministic and respects the probability switches") {
    AugmentRanges r;
    r.rot_prob = 1.0;
    r.scale_prob = 0.0;
    r.mirror_prob = 0.0;
    r.elastic_prob = 0.0;
    const GeomTransform a = sample_transform(99, r);
    const GeomTransform b = sample_transform(99, r);
    CHECK(a.rotation == b.rotation);
    CHECK(a.rotation != 0.0);
    CHECK(a.scale == 1.0);
    CHECK_FALSE(a.hflip);
    CHECK_FALSE(a.vflip);
    CHECK_FALSE(a.elastic.has_value());
    CHECK(std::abs(a.rotation) <= r.rot_max_rad);
}

TEST_CASE("component draws come from independent streams") {
    AugmentRanges both;
    both.rot_prob = 1.0;
    both.scale_prob = 1.0;
    both.mirror_prob = 0.0;
    both.elastic_prob = 0.0;
    AugmentRanges rot_only = both;
    rot_only.scale_prob = 0.0;
    // Turning scale off must not change what rotation is drawn.
    CHECK(sample_transform(7, both).rotation == sample_transform(7, rot_only).rotation);
}

TEST_CASE("scale draws stay inside the configured interval") {
    AugmentRanges r;
    r.rot_prob = 0.0;
    r.scale_prob = 1.0;
    r.mirror_prob = 0.0;
    r.elastic_prob = 0.0;
    r.scale_lo = 0.8;
    r.scale_hi = 1.3;
    for (uint64_t s = 0; s < 50; ++s) {
        const GeomTransform t = sample_transform(s, r);
        CHECK(t.scale >= 0.8);
        CHECK(t.scale <= 1.3);
    }
}

TEST_CASE("elastic warps are deterministic per seed and move pixels") {
    GeomTransform t;
    t.elastic = ElasticParams{6.0, 3.0};
    t.elastic_seed = 1234;
    const Image img = random_image(9, 24, 24, 1);
    const Image a = apply_to_image(t, img);
    const Image b = apply_to_image(t, img);
    CHECK(a.data == b.data);
    CHECK(a.data != img.data);
    GeomTransform other = t;
    other.elastic_seed = 1235;
    CHECK(apply_to_image(other, img).data != a.data);
}

TEST_CASE("augment_sample flags elastic flow resampling") {
    const Image img = random_image(10, 16, 16, 3);
    const LabelMask mask = random_mask(11, 16, 16);
    FlowField f(16, 16);
    std::fill(f.u.begin(), f.u.end(), 1.0f);

    GeomTransform t;
    t.elastic = ElasticParams{4.0, 2.0};
    t.elastic_seed = 5;
    const AugmentedSample with_flow = augment_sample(t, img, mask, &f, true);
    CHECK(with_flow.elastic_flow_approx);
    REQUIRE(with_flow.flow.has_value());

    const AugmentedSample frozen = augment_sample(t, img, mask, &f, false);
    CHECK_FALSE(frozen.elastic_flow_approx);

    const AugmentedSample no_flow = augment_sample(GeomTransform{}, img, mask, nullptr, true);
    CHECK_FALSE(no_flow.flow.has_value());
    CHECK(no_flow.image.data == img.data);
}

TEST_CASE("range validation rejects bad probabilities and scales") {
    AugmentRanges r;
    CHECK_NOTHROW(validate_ranges(r));
    r.rot_prob = 1.5;
    CHECK_THROWS_AS(validate_ranges(r), ValidationError);
    r = AugmentRanges{};
    r.scale_lo = 0.0;
    CHECK_THROWS_AS(validate_ranges(r), ValidationError);
    r = AugmentRanges{};
    r.scale_lo = 1.2;
    r.scale_hi = 0.9;
    CHECK_THROWS_AS(validate_ranges(r), ValidationError);
}
