#include <doctest.h>

#include <cmath>

#include "flowseg/flow_ops.hpp"
#include "flowseg/util.hpp"

using namespace flowseg;

TEST_CASE("rescale_flow scales components with the grid") {
    FlowField f(8, 4);
    std::fill(f.u.begin(), f.u.end(), 2.0f);
    std::fill(f.v.begin(), f.v.end(), -1.0f);
    const FlowField out = rescale_flow(f, 16, 12);
    REQUIRE(out.width == 16);
    REQUIRE(out.height == 12);
    for (size_t i = 0; i < out.u.size(); ++i) {
        CHECK(out.u[i] == doctest::Approx(2.0f * 16.0f / 8.0f).epsilon(1e-6));
        CHECK(out.v[i] == doctest::Approx(-1.0f * 12.0f / 4.0f).epsilon(1e-6));
    }
}

TEST_CASE("rescale_flow to the same grid is the identity") {
    FlowField f(5, 5);
    util::Rng rng(1);
    for (float& v : f.u) v = static_cast<float>(rng.uniform(-3.0, 3.0));
    for (float& v : f.v) v = static_cast<float>(rng.uniform(-3.0, 3.0));
    const FlowField out = rescale_flow(f, 5, 5);
    CHECK(out.u == f.u);
    CHECK(out.v == f.v);
}

TEST_CASE("round-trip rescale recovers a smooth field") {
    FlowField f(32, 24);
    for (int y = 0; y < 24; ++y)
        for (int x = 0; x < 32; ++x) {
            f.u[f.idx(x, y)] = 0.05f * x + 0.01f * y;
            f.v[f.idx(x, y)] = -0.03f * x + 0.02f * y;
        }
    const FlowField back = rescale_flow(rescale_flow(f, 64, 48), 32, 24);
    for (int y = 2; y < 22; ++y)
        for (int x = 2; x < 30; ++x) {
            const size_t i = f.idx(x, y);
            CHECK(back.u[i] == doctest::Approx(f.u[i]).epsilon(1e-3));
            CHECK(back.v[i] == doctest::Approx(f.v[i]).epsilon(1e-3));
        }
}

TEST_CASE("pairing validation") {
    FlowPairing p;
    CHECK_NOTHROW(validate_pairing(p));
    p.offset = 0;
    CHECK_THROWS_AS(validate_pairing(p), ValidationError);
}

TEST_CASE("reference index under the zero-flow policy") {
    FlowPairing p;
    p.offset = 5;
    p.boundary = BoundaryPolicy::ZeroFlow;
    CHECK_FALSE(reference_index(0, 12, p).has_value());
    CHECK_FALSE(reference_index(4, 12, p).has_value());
    REQUIRE(reference_index(5, 12, p).has_value());
    CHECK(*reference_index(5, 12, p) == 0);
    CHECK(*reference_index(11, 12, p) == 6);
}

TEST_CASE("reference index under the clamp policy") {
    FlowPairing p;
    p.offset = 5;
    p.boundary = BoundaryPolicy::ClampToFirst;
    REQUIRE(reference_index(0, 12, p).has_value());
    CHECK(*reference_index(0, 12, p) == 0);
    CHECK(*reference_index(3, 12, p) == 0);
    CHECK(*reference_index(7, 12, p) == 2);
}

TEST_CASE("reference index rejects out-of-clip queries") {
    FlowPairing p;
    CHECK_THROWS_AS(reference_index(12, 12, p), ValidationError);
}

TEST_CASE("pair_frames resolves ids") {
    const std::vector<std::string> clip = {"f0", "f1", "f2", "f3"};
    FlowPairing p;
    p.offset = 2;
    const FramePair early = pair_frames(clip, 1, p);
    CHECK(early.current == "f1");
    CHECK_FALSE(early.reference.has_value());
    const FramePair late = pair_frames(clip, 3, p);
    CHECK(late.current == "f3");
    REQUIRE(late.reference.has_value());
    CHECK(*late.reference == "f1");
}
