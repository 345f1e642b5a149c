#pragma once

#include <string>
#include <vector>

#include "flowseg/augment.hpp"
#include "flowseg/dataset.hpp"
#include "flowseg/flow_ops.hpp"
#include "flowseg/flow_repr.hpp"
#include "flowseg/horn_schunck.hpp"
#include "flowseg/tiling.hpp"
#include "flowseg/train.hpp"

namespace flowseg {

// Everything a run needs, parsed from one sectioned key=value file. Unknown
// sections or keys are rejected so typos fail loudly instead of silently
// using a default.
struct ExperimentConfig {
    struct DatasetPart {
        std::string root = "data";
        std::string manifest; // empty = <out>/manifest.tsv
        std::string class_map = "identity";
        FilenameTemplates names;
    } dataset;

    // Defaults cover the four-case synthetic dataset; preset=surgical selects
    // the standard case split of the real dataset.
    struct SplitPart {
        bool surgical = false;
        std::vector<int> train = {1, 2};
        std::vector<int> val = {3};
        std::vector<int> test = {4};
    } split;

    SynthParams synth;

    struct FlowPart {
        HSParams hs;
        PyramidConfig pyr;
        std::vector<int> offsets = {1, 5};
        BoundaryPolicy boundary = BoundaryPolicy::ZeroFlow;
        int tile_size = 256;
        BlendMode blend = BlendMode::LinearFeather;
    } flow;

    struct ReprPart {
        std::vector<EncodingKind> encodings = {EncodingKind::RGBof, EncodingKind::XY,
                                               EncodingKind::PC};
        NormalizationPolicy norm;
    } repr;

    AugmentRanges augment;

    struct NetPart {
        int depth = 3;
        int base_width = 16;
    } net;

    TrainConfig train;

    struct RunPart {
        uint64_t seed = 1337;
        int workers = 1;
        std::string variants = "all";
        std::string out = "out";
    } run;
};

ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);

void validate_config(const ExperimentConfig& cfg);

// Every key with its effective value, parseable by parse_config. Written into
// the output directory so each run records the configuration it actually ran.
std::string render_config(const ExperimentConfig& cfg);

// The case split the config selects (validated against the manifest by the
// caller).
CaseSplit resolve_split(const ExperimentConfig& cfg);

} // namespace flowseg
