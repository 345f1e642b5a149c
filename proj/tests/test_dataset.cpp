#include <doctest.h>

#include <filesystem>

#include "flowseg/dataset.hpp"
#include "flowseg/png_io.hpp"
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

} // namespace

TEST_CASE("surgical class map keeps exactly the two instrument labels") {
    const ClassMap m = ClassMap::surgical_default();
    CHECK(m.to_class[5] == kGrasper);
    CHECK(m.to_class[9] == kLhook);
    for (int raw = 0; raw <= 12; ++raw) {
        if (raw == 5 || raw == 9) continue;
        CHECK(m.to_class[raw] == kBackground);
    }
    CHECK(m.to_class[13] == -1);
    CHECK_NOTHROW(validate_class_map(m));
}

TEST_CASE("identity class map passes labels straight through") {
    const ClassMap m = ClassMap::identity();
    CHECK(m.to_class[0] == 0);
    CHECK(m.to_class[1] == 1);
    CHECK(m.to_class[2] == 2);
    CHECK(m.to_class[3] == -1);
}

TEST_CASE("class map parsing") {
    CHECK(ClassMap::parse("surgical").to_class[5] == kGrasper);
    CHECK(ClassMap::parse("identity").to_class[2] == kLhook);
    const ClassMap custom = ClassMap::parse("7:1,11:2");
    CHECK(custom.to_class[7] == 1);
    CHECK(custom.to_class[11] == 2);
    CHECK_THROWS_AS(ClassMap::parse("bogus"), ValidationError);
}

TEST_CASE("remap rejects unmapped labels with a count") {
    LabelMask raw(4, 1);
    raw.labels = {0, 5, 42, 42};
    const ClassMap m = ClassMap::surgical_default();
    CHECK_THROWS_WITH_AS(remap_mask(raw, m), doctest::Contains("42"), ValidationError);
}

TEST_CASE("remap translates every pixel") {
    LabelMask raw(3, 1);
    raw.labels = {0, 5, 9};
    const LabelMask out = remap_mask(raw, ClassMap::surgical_default());
    CHECK(out.labels == std::vector<uint8_t>{0, 1, 2});
}

TEST_CASE("template expansion substitutes the frame number") {
    CHECK(expand_template("frame_{n}_endo.png", 1234) == "frame_1234_endo.png");
    CHECK_THROWS_AS(expand_template("no_placeholder.png", 7), ValidationError);
}

TEST_CASE("synthetic dataset generates the surgical layout deterministically") {
    TempDir dir("synth_a");
    SynthParams p;
    p.cases = 2;
    p.clips_per_case = 2;
    p.frames_per_clip = 6;
    p.width = 48;
    p.height = 48;
    const DatasetManifest m = synth_dataset(11, p, dir.path.string());
    CHECK(m.cases.size() == 2);
    CHECK(m.frame_count() == 2u * 2u * 6u);
    CHECK_NOTHROW(validate_manifest(m));

    const FrameRecord& fr = m.cases[0].clips[0].frames[0];
    CHECK(fs::exists(dir.path / fr.image_path));
    CHECK(fs::exists(dir.path / fr.mask_path));

    // Masks use the identity label set.
    const LabelMask mask = read_mask_png(dir.path / fr.mask_path);
    for (uint8_t v : mask.labels) CHECK(v <= 2);

    TempDir dir2("synth_b");
    const DatasetManifest m2 = synth_dataset(11, p, dir2.path.string());
    REQUIRE(m2.cases.size() == m.cases.size());
    const uint64_t h1 = util::fnv1a64_file(dir.path / fr.image_path);
    const uint64_t h2 = util::fnv1a64_file(dir2.path / fr.image_path);
    CHECK(h1 == h2);

    const DatasetManifest m3 = synth_dataset(12, p, dir2.path.string());
    CHECK(util::fnv1a64_file(dir2.path / m3.cases[0].clips[0].frames[0].image_path) != h1);
}

TEST_CASE("scanning the generated tree reproduces the manifest") {
    TempDir dir("synth_scan");
    SynthParams p;
    p.cases = 2;
    p.clips_per_case = 1;
    p.frames_per_clip = 6;
    p.width = 48;
    p.height = 48;
    const DatasetManifest made = synth_dataset(21, p, dir.path.string());
    const DatasetManifest scanned =
        build_manifest(dir.path.string(), FilenameTemplates{}, ClassMap::identity());
    REQUIRE(scanned.cases.size() == made.cases.size());
    for (size_t c = 0; c < made.cases.size(); ++c) {
        CHECK(scanned.cases[c].case_id == made.cases[c].case_id);
        REQUIRE(scanned.cases[c].clips.size() == made.cases[c].clips.size());
        for (size_t k = 0; k < made.cases[c].clips.size(); ++k) {
            const ClipRecord& a = scanned.cases[c].clips[k];
            const ClipRecord& b = made.cases[c].clips[k];
            CHECK(a.clip_id == b.clip_id);
            REQUIRE(a.frames.size() == b.frames.size());
            for (size_t i = 0; i < a.frames.size(); ++i) {
                CHECK(a.frames[i].image_path == b.frames[i].image_path);
                CHECK(a.frames[i].has_grasper == b.frames[i].has_grasper);
                CHECK(a.frames[i].has_lhook == b.frames[i].has_lhook);
            }
        }
    }
}

TEST_CASE("manifest file round-trip") {
    TempDir dir("manifest_rt");
    SynthParams p;
    p.cases = 2;
    p.clips_per_case = 1;
    p.frames_per_clip = 6;
    p.width = 48;
    p.height = 48;
    const DatasetManifest m = synth_dataset(31, p, dir.path.string());
    const std::string mp = (dir.path / "manifest.tsv").string();
    write_manifest(m, mp);
    const DatasetManifest back = read_manifest(mp);
    CHECK(back.root == m.root);
    REQUIRE(back.frame_count() == m.frame_count());
    CHECK(back.cases[1].clips[0].frames[2].mask_path == m.cases[1].clips[0].frames[2].mask_path);
    CHECK(back.cases[1].clips[0].frames[2].has_lhook == m.cases[1].clips[0].frames[2].has_lhook);
}

TEST_CASE("manifest validation catches non-consecutive frames") {
    DatasetManifest m;
    m.root = ".";
    CaseRecord cr;
    cr.case_id = 1;
    ClipRecord clip;
    clip.clip_id = 100;
    for (int i : {0, 1, 3}) {
        FrameRecord fr;
        fr.index = 100 + i;
        fr.image_path = "x.png";
        fr.mask_path = "y.png";
        clip.frames.push_back(fr);
    }
    cr.clips.push_back(clip);
    m.cases.push_back(cr);
    CHECK_THROWS_AS(validate_manifest(m), ValidationError);
}

TEST_CASE("missing mask file fails with the frame named") {
    TempDir dir("missing_mask");
    SynthParams p;
    p.cases = 1;
    p.clips_per_case = 1;
    p.frames_per_clip = 6;
    p.width = 48;
    p.height = 48;
    const DatasetManifest m = synth_dataset(41, p, dir.path.string());
    const fs::path victim = dir.path / m.cases[0].clips[0].frames[1].mask_path;
    fs::remove(victim);
    CHECK_THROWS_WITH_AS(
        build_manifest(dir.path.string(), FilenameTemplates{}, ClassMap::identity()),
        doctest::Contains(m.cases[0].clips[0].frames[1].mask_path.c_str()), MissingArtifactError);
}

TEST_CASE("standard case split lists the published subsets") {
    const CaseSplit s = CaseSplit::surgical_default();
    CHECK(s.train == std::vector<int>{1, 12, 17, 25, 27, 28, 35, 43, 48});
    CHECK(s.validation == std::vector<int>{18, 20, 24, 37});
    CHECK(s.test == std::vector<int>{9, 26, 52, 55});
}

TEST_CASE("split validation requires disjoint full coverage") {
    TempDir dir("split_check");
    SynthParams p;
    p.cases = 3;
    p.clips_per_case = 1;
    p.frames_per_clip = 6;
    p.width = 48;
    p.height = 48;
    const DatasetManifest m = synth_dataset(51, p, dir.path.string());

    CaseSplit ok;
    ok.train = {1};
    ok.validation = {2};
    ok.test = {3};
    CHECK_NOTHROW(validate_split(m, ok));

    CaseSplit overlap = ok;
    overlap.validation = {1};
    CHECK_THROWS_AS(validate_split(m, overlap), ValidationError);

    CaseSplit missing = ok;
    missing.test = {};
    CHECK_THROWS_AS(validate_split(m, missing), ValidationError);

    CaseSplit unknown = ok;
    unknown.test = {3, 9};
    CHECK_THROWS_AS(validate_split(m, unknown), ValidationError);
}

TEST_CASE("split_by_cases partitions frames and balance stats count presence") {
    TempDir dir("split_stats");
    SynthParams p;
    p.cases = 4;
    p.clips_per_case = 2;
    p.frames_per_clip = 6;
    p.width = 48;
    p.height = 48;
    const DatasetManifest m = synth_dataset(61, p, dir.path.string());
    CaseSplit s;
    s.train = {1, 2};
    s.validation = {3};
    s.test = {4};
    const SplitManifests sm = split_by_cases(m, s);
    CHECK(sm.train.frame_count() == 24);
    CHECK(sm.validation.frame_count() == 12);
    CHECK(sm.test.frame_count() == 12);
    CHECK(sm.train.root == m.root);

    const ClassBalance all = class_balance_stats(m);
    CHECK(all.frames == 48);
    const ClassBalance train = class_balance_stats(sm.train);
    const ClassBalance val = class_balance_stats(sm.validation);
    const ClassBalance test = class_balance_stats(sm.test);
    CHECK(train.frames + val.frames + test.frames == all.frames);
    CHECK(train.grasper_frames + val.grasper_frames + test.grasper_frames == all.grasper_frames);
    CHECK(all.grasper_frames > 0);
    CHECK(all.grasper_pct() == doctest::Approx(100.0 * all.grasper_frames / 48.0));
}

TEST_CASE("synthetic parameter validation") {
    SynthParams p;
    CHECK_NOTHROW(validate_synth_params(p));
    p.cases = 0;
    CHECK_THROWS_AS(validate_synth_params(p), ValidationError);
    p = SynthParams{};
    p.width = 16;
    CHECK_THROWS_AS(validate_synth_params(p), ValidationError);
    p = SynthParams{};
    p.fast_speed = p.slow_speed;
    CHECK_THROWS_AS(validate_synth_params(p), ValidationError);
}
