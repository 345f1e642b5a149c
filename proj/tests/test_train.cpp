#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "flowseg/flo_io.hpp"
#include "flowseg/pyramid.hpp"
#include "flowseg/resample.hpp"
#include "flowseg/train.hpp"
#include "flowseg/util.hpp"

using namespace flowseg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const char* tag) {
        path = fs::temp_directory_path() / (std::string("flowseg_") + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

Image smooth_texture(uint64_t seed, int w, int h) {
    Image img(w, h, 1);
    util::Rng rng(seed);
    for (float& v : img.data) v = static_cast<float>(rng.uniform());
    img = gaussian_blur5(gaussian_blur5(gaussian_blur5(img)));
    return img;
}

FlowField constant_field(int w, int h, float u, float v) {
    FlowField f(w, h);
    std::fill(f.u.begin(), f.u.end(), u);
    std::fill(f.v.begin(), f.v.end(), v);
    return f;
}

std::vector<TrainSample> toy_samples(uint64_t seed, int count, int side) {
    std::vector<TrainSample> out;
    util::Rng rng(seed);
    for (int i = 0; i < count; ++i) {
        TrainSample s;
        s.image = Image(side, side, 3);
        for (float& v : s.image.data) v = static_cast<float>(rng.uniform());
        s.mask = LabelMask(side, side);
        for (uint8_t& v : s.mask.labels) v = static_cast<uint8_t>(rng.uniform_int(0, 2));
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace

TEST_CASE("train config validation") {
    CHECK_NOTHROW(validate_train_config(TrainConfig{}));
    TrainConfig tc;
    tc.epochs = 0;
    CHECK_THROWS_AS(validate_train_config(tc), ValidationError);
    tc = TrainConfig{};
    tc.batch_size = 0;
    CHECK_THROWS_AS(validate_train_config(tc), ValidationError);
    tc = TrainConfig{};
    tc.learning_rate = 0.0;
    CHECK_THROWS_AS(validate_train_config(tc), ValidationError);
    tc = TrainConfig{};
    tc.momentum = 1.0;
    CHECK_THROWS_AS(validate_train_config(tc), ValidationError);
    tc = TrainConfig{};
    tc.dice_weight = 0.0;
    tc.ce_weight = 0.0;
    CHECK_THROWS_AS(validate_train_config(tc), ValidationError);
    tc = TrainConfig{};
    tc.crop = 4;
    CHECK_THROWS_AS(validate_train_config(tc), ValidationError);
}

TEST_CASE("stitched flow recovers a constant translation across both tiles") {
    const Image texture = smooth_texture(301, 96, 64);
    const FlowField truth = constant_field(96, 64, 1.6f, -0.9f);
    const Image moved = warp_by_flow(texture, truth);

    const TilingPlan plan = plan_tiles(96, 64, 48);
    PyramidConfig pyr;
    pyr.levels = 2;
    HSParams hs;
    hs.alpha = 10.0;
    hs.iterations = 200;

    const FlowField stitched = estimate_stitched_flow(moved, texture, plan, pyr, hs);
    CHECK(stitched.width == plan.stitched_w);
    CHECK(stitched.height == plan.stitched_h);

    const FlowField full = rescale_flow(stitched, 96, 64);
    double epe = 0.0;
    int n = 0;
    for (int y = 8; y < 56; ++y)
        for (int x = 8; x < 88; ++x) {
            const size_t i = full.idx(x, y);
            epe += std::hypot(full.u[i] - 1.6, full.v[i] + 0.9);
            ++n;
        }
    CHECK(epe / n < 0.35);
}

TEST_CASE("stitched flow validates its inputs") {
    const TilingPlan plan = plan_tiles(96, 64, 48);
    Image a(96, 64, 1), b(64, 64, 1), c(80, 64, 1);
    CHECK_THROWS_AS(estimate_stitched_flow(a, b, plan, PyramidConfig{}, HSParams{}),
                    ValidationError);
    CHECK_THROWS_AS(estimate_stitched_flow(c, c, plan, PyramidConfig{}, HSParams{}),
                    ValidationError);
}

TEST_CASE("encode_channels lays out RGB planes then flow planes") {
    Image rgb(2, 2, 3);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x)
            for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = 0.1f * (y * 2 + x) + 0.02f * c;

    const VariantSpec& plain = find_variant("rgb");
    const Tensor<float> x3 = encode_channels(rgb, nullptr, plain, NormalizationPolicy{});
    CHECK(x3.c == 3);
    for (int y = 0; y < 2; ++y)
        for (int xx = 0; xx < 2; ++xx)
            for (int c = 0; c < 3; ++c) CHECK(x3.at(0, c, y, xx) == rgb.at(xx, y, c));

    const FlowField f = constant_field(2, 2, 1.5f, -2.0f);
    const VariantSpec& xy = find_variant("t1_xy");
    const Tensor<float> x5 = encode_channels(rgb, &f, xy, NormalizationPolicy{});
    CHECK(x5.c == 5);
    for (int y = 0; y < 2; ++y)
        for (int xx = 0; xx < 2; ++xx) {
            CHECK(x5.at(0, 3, y, xx) == 1.5f);
            CHECK(x5.at(0, 4, y, xx) == -2.0f);
        }

    const FlowField zero = constant_field(2, 2, 0.0f, 0.0f);
    const VariantSpec& wheel = find_variant("t1_rgbof");
    const Tensor<float> x6 = encode_channels(rgb, &zero, wheel, NormalizationPolicy{});
    CHECK(x6.c == 6);
    for (int c = 3; c < 6; ++c) CHECK(x6.at(0, c, 0, 0) == 1.0f); // zero flow renders white
}

TEST_CASE("encode_channels validates shapes and required flow") {
    Image gray(2, 2, 1);
    CHECK_THROWS_AS(encode_channels(gray, nullptr, find_variant("rgb"), NormalizationPolicy{}),
                    ValidationError);
    Image rgb(2, 2, 3);
    CHECK_THROWS_AS(encode_channels(rgb, nullptr, find_variant("t1_xy"), NormalizationPolicy{}),
                    ValidationError);
    const FlowField wrong = constant_field(3, 2, 0.0f, 0.0f);
    CHECK_THROWS_AS(encode_channels(rgb, &wrong, find_variant("t1_xy"), NormalizationPolicy{}),
                    ValidationError);
}

TEST_CASE("channel statistics match hand-computed population moments") {
    TrainSample s;
    s.image = Image(2, 1, 3);
    for (int c = 0; c < 3; ++c) {
        s.image.at(0, 0, c) = 0.0f;
        s.image.at(1, 0, c) = 1.0f;
    }
    const ChannelStats st =
        compute_channel_stats({s}, find_variant("rgb"), NormalizationPolicy{});
    REQUIRE(st.mean.size() == 3);
    for (int c = 0; c < 3; ++c) {
        CHECK(st.mean[c] == doctest::Approx(0.5));
        CHECK(st.stdev[c] == doctest::Approx(0.5));
    }
}

TEST_CASE("constant channels get the variance floor instead of zero") {
    TrainSample s;
    s.image = Image(4, 4, 3);
    std::fill(s.image.data.begin(), s.image.data.end(), 0.25f);
    const ChannelStats st =
        compute_channel_stats({s}, find_variant("rgb"), NormalizationPolicy{});
    for (int c = 0; c < 3; ++c) {
        CHECK(st.mean[c] == doctest::Approx(0.25));
        CHECK(st.stdev[c] == doctest::Approx(1e-4));
    }
    CHECK_THROWS_AS(compute_channel_stats({}, find_variant("rgb"), NormalizationPolicy{}),
                    ValidationError);
}

TEST_CASE("load_samples reads frames and flow artifacts per variant") {
    TempDir tmp("load_samples");
    SynthParams p;
    p.cases = 1;
    p.clips_per_case = 1;
    p.frames_per_clip = 6;
    p.width = 48;
    p.height = 48;
    const DatasetManifest m = synth_dataset(11, p, (tmp.path / "data").string());
    const ArtifactPaths paths((tmp.path / "out").string());
    const ClassMap map = ClassMap::identity();

    const std::vector<TrainSample> rgb_samples =
        load_samples(m, find_variant("rgb"), map, paths);
    REQUIRE(rgb_samples.size() == 6);
    for (const TrainSample& s : rgb_samples) {
        CHECK(s.image.channels == 3);
        CHECK_FALSE(s.flow.has_value());
    }

    // Flow variants need the .flo artifacts; frame 0 has no reference and
    // falls back to a zero field. The 24px fields exercise the rescale path.
    const CaseRecord& cr = m.cases[0];
    const ClipRecord& clip = cr.clips[0];
    for (size_t pi = 1; pi < clip.frames.size(); ++pi) {
        const std::string flo =
            paths.flo_path(1, cr.case_id, clip.clip_id, clip.frames[pi].index);
        ensure_parent_dir(flo);
        write_flo(flo, constant_field(24, 24, 1.0f, 2.0f));
    }
    const std::vector<TrainSample> xy_samples =
        load_samples(m, find_variant("t1_xy"), map, paths);
    REQUIRE(xy_samples.size() == 6);
    REQUIRE(xy_samples[0].flow.has_value());
    CHECK(xy_samples[0].flow->u[0] == 0.0f);
    CHECK(xy_samples[0].flow->v[0] == 0.0f);
    REQUIRE(xy_samples[1].flow.has_value());
    CHECK(xy_samples[1].flow->width == 48);
    CHECK(xy_samples[1].flow->height == 48);
    CHECK(xy_samples[1].flow->u[xy_samples[1].flow->idx(24, 24)] == doctest::Approx(2.0f));

    const std::string last =
        paths.flo_path(1, cr.case_id, clip.clip_id, clip.frames.back().index);
    fs::remove(last);
    CHECK_THROWS_WITH_AS(load_samples(m, find_variant("t1_xy"), map, paths),
                         doctest::Contains(".flo"), MissingArtifactError);
}

TEST_CASE("train_one is deterministic per run seed") {
    const std::vector<TrainSample> train = toy_samples(21, 6, 16);
    const std::vector<TrainSample> val = toy_samples(22, 2, 16);
    const VariantSpec& variant = find_variant("rgb");
    const NormalizationPolicy norm;
    const ChannelStats stats = compute_channel_stats(train, variant, norm);

    NetworkConfig nc;
    nc.depth = 2;
    nc.base_width = 2;
    TrainConfig tc;
    tc.epochs = 2;
    tc.batch_size = 2;
    tc.crop = 8;
    tc.repeats = 1;
    const AugmentRanges aug;

    RunResult a = train_one(train, val, variant, norm, stats, nc, tc, aug, 42);
    RunResult b = train_one(train, val, variant, norm, stats, nc, tc, aug, 42);
    RunResult c = train_one(train, val, variant, norm, stats, nc, tc, aug, 43);

    REQUIRE(a.history.size() == 2);
    CHECK(a.best_epoch >= 1);
    CHECK(a.best_epoch <= 2);
    REQUIRE(b.history.size() == 2);
    for (size_t e = 0; e < a.history.size(); ++e) {
        CHECK(a.history[e].train_loss == b.history[e].train_loss);
        CHECK(a.history[e].val_loss == b.history[e].val_loss);
    }
    for (size_t i = 0; i < a.model.params().size(); ++i)
        CHECK(a.model.params()[i].value.data == b.model.params()[i].value.data);
    bool differs = false;
    for (size_t e = 0; e < a.history.size(); ++e)
        differs = differs || a.history[e].train_loss != c.history[e].train_loss;
    CHECK(differs);
    CHECK(a.model.stats().mean == stats.mean);
}

TEST_CASE("train_one validates crop geometry") {
    const std::vector<TrainSample> train = toy_samples(31, 2, 16);
    const VariantSpec& variant = find_variant("rgb");
    const ChannelStats stats = compute_channel_stats(train, variant, NormalizationPolicy{});
    NetworkConfig nc;
    nc.depth = 3;
    nc.base_width = 2;
    TrainConfig tc;
    tc.epochs = 1;
    tc.crop = 10; // not a multiple of the depth-3 stride 4
    CHECK_THROWS_AS(train_one(train, {}, variant, NormalizationPolicy{}, stats, nc, tc,
                              AugmentRanges::disabled(), 1),
                    ValidationError);
    tc.crop = 32; // larger than the 16px frames
    nc.depth = 2;
    CHECK_THROWS_AS(train_one(train, {}, variant, NormalizationPolicy{}, stats, nc, tc,
                              AugmentRanges::disabled(), 1),
                    ValidationError);
    CHECK_THROWS_AS(train_one({}, {}, variant, NormalizationPolicy{}, stats, nc, TrainConfig{},
                              AugmentRanges::disabled(), 1),
                    ValidationError);
}

TEST_CASE("evaluate_samples aggregates whole-frame metrics") {
    const std::vector<TrainSample> train = toy_samples(41, 4, 16);
    const VariantSpec& variant = find_variant("rgb");
    const NormalizationPolicy norm;
    const ChannelStats stats = compute_channel_stats(train, variant, norm);
    NetworkConfig nc;
    nc.depth = 2;
    nc.base_width = 2;
    TrainConfig tc;
    tc.epochs = 1;
    tc.batch_size = 2;
    tc.crop = 8;
    RunResult r = train_one(train, {}, variant, norm, stats, nc, tc,
                            AugmentRanges::disabled(), 7);

    // Odd-sized frames are center-cropped to the stride grid before inference.
    std::vector<TrainSample> test = toy_samples(42, 3, 16);
    test.push_back(toy_samples(43, 1, 17)[0]);
    const MetricsRecord rec = evaluate_samples(r.model, test, variant, norm);
    CHECK(rec.grasper.defined);
    CHECK(rec.lhook.defined);
    CHECK(rec.mean.defined);
    CHECK(rec.grasper.dc >= 0.0);
    CHECK(rec.grasper.dc <= 1.0);

    CHECK_THROWS_AS(evaluate_samples(r.model, {}, variant, norm), ValidationError);
}
