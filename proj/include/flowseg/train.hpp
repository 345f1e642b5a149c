#pragma once

#include <optional>
#include <vector>

#include "flowseg/artifacts.hpp"
#include "flowseg/augment.hpp"
#include "flowseg/dataset.hpp"
#include "flowseg/horn_schunck.hpp"
#include "flowseg/metrics.hpp"
#include "flowseg/net.hpp"
#include "flowseg/tiling.hpp"
#include "flowseg/variants.hpp"

namespace flowseg {

struct TrainConfig {
    int epochs = 16;
    int batch_size = 4;
    double learning_rate = 0.05;
    double momentum = 0.9;
    double dice_weight = 1.0;
    double ce_weight = 1.0;
    int repeats = 4; // independently seeded trainings per variant
    int crop = 64;   // training crop side, must clear the pooling stride
};

void validate_train_config(const TrainConfig& tc);

// Full tile pipeline for one frame pair: two square crops, downscale,
// per-tile coarse-to-fine estimation, stitch. The result lives on the
// stitched raster; rescale_flow() brings it back to source resolution.
FlowField estimate_stitched_flow(const Image& a, const Image& b, const TilingPlan& plan,
                                 const PyramidConfig& pyr, const HSParams& hs);

// One frame ready for training: image, remapped mask, and (flow variants
// only) the flow field rescaled to the image grid.
struct TrainSample {
    Image image;
    LabelMask mask;
    std::optional<FlowField> flow;
};

// Loads every frame of the split. Flow fields come from the .flo artifacts
// under `paths`; frames before the pairing offset get a zero field under
// ZeroFlow. Throws MissingArtifactError naming the missing frames.
std::vector<TrainSample> load_samples(const DatasetManifest& split, const VariantSpec& variant,
                                      const ClassMap& map, const ArtifactPaths& paths);

// RGB planes first, then the encoded flow planes. Unnormalized.
Tensor<float> encode_channels(const Image& rgb, const FlowField* flow, const VariantSpec& variant,
                              const NormalizationPolicy& norm);

// Per-channel mean/stdev over the un-augmented training inputs; the variance
// floor keeps constant channels finite.
ChannelStats compute_channel_stats(const std::vector<TrainSample>& samples,
                                   const VariantSpec& variant, const NormalizationPolicy& norm);

struct EpochStats {
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct RunResult {
    UNet<float> model; // best-validation weights, stats attached
    std::vector<EpochStats> history;
    int best_epoch = 0; // 1-based; earliest epoch wins ties
};

// One seeded training run: per-epoch shuffled SGD with on-the-fly geometric
// augmentation and random crops. Deterministic for a given run_seed.
RunResult train_one(const std::vector<TrainSample>& train, const std::vector<TrainSample>& val,
                    const VariantSpec& variant, const NormalizationPolicy& norm,
                    const ChannelStats& stats, const NetworkConfig& nc, const TrainConfig& tc,
                    const AugmentRanges& aug, uint64_t run_seed);

// Whole-frame inference (center-cropped to the pooling stride) and per-frame
// metric accumulation over the instrument classes.
MetricsRecord evaluate_samples(UNet<float>& model, const std::vector<TrainSample>& test,
                               const VariantSpec& variant, const NormalizationPolicy& norm);

} // namespace flowseg
