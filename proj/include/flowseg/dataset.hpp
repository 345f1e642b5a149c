#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "flowseg/raster.hpp"

namespace flowseg {

inline constexpr int kBackground = 0;
inline constexpr int kGrasper = 1;
inline constexpr int kLhook = 2;
inline constexpr int kNumClasses = 3;

// Total map from raw mask labels to {0 background, 1 grasper, 2 l-hook}.
// Exactly two raw labels map to instruments.
struct ClassMap {
    std::array<int8_t, 256> to_class; // -1 = unmapped

    ClassMap();

    // The 13-label surgical palette with raw 5 = grasper and raw 9 = l-hook,
    // everything else background.
    static ClassMap surgical_default();
    // Raw labels already in {0, 1, 2} (the synthetic generator's output).
    static ClassMap identity();
    // "surgical", "identity", or explicit "raw:class,raw:class,..." pairs;
    // labels missing from an explicit list map to background.
    static ClassMap parse(const std::string& text);
};

void validate_class_map(const ClassMap& m);

// Throws ValidationError naming the label and its pixel count when the raw
// mask contains an unmapped value.
LabelMask remap_mask(const LabelMask& raw, const ClassMap& m);

struct FrameRecord {
    int index = 0; // frame number within the clip, consecutive
    std::string image_path;
    std::string mask_path;
    bool has_grasper = false;
    bool has_lhook = false;
};

struct ClipRecord {
    int clip_id = 0; // start frame number, names the clip directory
    std::vector<FrameRecord> frames;
};

struct CaseRecord {
    int case_id = 0;
    std::vector<ClipRecord> clips;
};

struct DatasetManifest {
    std::string root; // paths in frame records are relative to this
    std::vector<CaseRecord> cases;

    size_t frame_count() const;
    bool empty() const { return cases.empty(); }
};

// Frames inside every clip must be consecutive and ordered so temporal
// pairing stays valid.
void validate_manifest(const DatasetManifest& m);

struct FilenameTemplates {
    // "{n}" expands to the frame number.
    std::string image = "frame_{n}_endo.png";
    std::string mask = "frame_{n}_endo_watermask.png";
};

std::string expand_template(const std::string& tmpl, int frame_number);

// Scans root for video<case>/video<case>_<clipstart>/ frame files, reads each
// mask to derive presence flags, and returns the ordered manifest.
DatasetManifest build_manifest(const std::string& root, const FilenameTemplates& names,
                               const ClassMap& map);

// Line-delimited text, tab-separated: case, clip, index, image, mask, flags.
// The dataset root rides along in a "# root:" comment so a reread manifest
// still resolves its frame paths.
void write_manifest(const DatasetManifest& m, const std::string& path);
DatasetManifest read_manifest(const std::string& path);

struct CaseSplit {
    std::vector<int> train;
    std::vector<int> validation;
    std::vector<int> test;

    static CaseSplit surgical_default();
};

// Disjoint, non-empty, and together covering every manifest case.
void validate_split(const DatasetManifest& m, const CaseSplit& s);

struct SplitManifests {
    DatasetManifest train;
    DatasetManifest validation;
    DatasetManifest test;
};

SplitManifests split_by_cases(const DatasetManifest& m, const CaseSplit& s);

// A frame counts for a class when at least one pixel carries its label.
struct ClassBalance {
    size_t frames = 0;
    size_t grasper_frames = 0;
    size_t lhook_frames = 0;

    double grasper_pct() const;
    double lhook_pct() const;
};

ClassBalance class_balance_stats(const DatasetManifest& m);

// Parameters for the synthetic stand-in dataset: two textured shapes over a
// drifting background, where the rarer class moves at least 3x faster.
struct SynthParams {
    int cases = 4;
    int clips_per_case = 3;
    int frames_per_clip = 12;
    int width = 96;
    int height = 96;
    double slow_speed = 0.7; // px per frame, class 1
    double fast_speed = 2.4; // px per frame, class 2
};

void validate_synth_params(const SynthParams& p);

// Writes frames and masks in the surgical directory layout under root,
// deterministically for a given seed, and returns the manifest.
DatasetManifest synth_dataset(uint64_t seed, const SynthParams& p, const std::string& root);

} // namespace flowseg
