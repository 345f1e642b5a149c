#include "flowseg/train.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "flowseg/flo_io.hpp"
#include "flowseg/png_io.hpp"
#include "flowseg/resample.hpp"
#include "flowseg/util.hpp"

namespace fs = std::filesystem;

namespace flowseg {

void validate_train_config(const TrainConfig& tc) {
    if (tc.epochs < 1) throw ValidationError("training needs at least one epoch");
    if (tc.batch_size < 1) throw ValidationError("batch size must be positive");
    if (!(tc.learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
    if (tc.momentum < 0.0 || tc.momentum >= 1.0)
        throw ValidationError("momentum must be in [0, 1)");
    if (tc.dice_weight < 0.0 || tc.ce_weight < 0.0)
        throw ValidationError("loss weights must be non-negative");
    if (tc.dice_weight == 0.0 && tc.ce_weight == 0.0)
        throw ValidationError("at least one loss weight must be positive");
    if (tc.repeats < 1) throw ValidationError("repeats must be at least 1");
    if (tc.crop < 8) throw ValidationError("training crop must be at least 8px");
}

FlowField estimate_stitched_flow(const Image& a, const Image& b, const TilingPlan& plan,
                                 const PyramidConfig& pyr, const HSParams& hs) {
    if (!a.same_shape(b)) throw ValidationError("frame pair shapes differ");
    if (a.width != plan.source_w || a.height != plan.source_h)
        throw ValidationError("frame does not match the tiling plan");
    const Image la = make_tile(a, plan, false);
    const Image lb = make_tile(b, plan, false);
    const Image ra = make_tile(a, plan, true);
    const Image rb = make_tile(b, plan, true);
    const FlowField left = estimate_flow(la, lb, pyr, hs);
    const FlowField right = estimate_flow(ra, rb, pyr, hs);
    return stitch(left, right, plan);
}

namespace {

FlowField zero_field(int w, int h) {
    FlowField f;
    f.width = w;
    f.height = h;
    f.u.assign(static_cast<size_t>(w) * h, 0.0f);
    f.v.assign(static_cast<size_t>(w) * h, 0.0f);
    return f;
}

} // namespace

std::vector<TrainSample> load_samples(const DatasetManifest& split, const VariantSpec& variant,
                                      const ClassMap& map, const ArtifactPaths& paths) {
    std::vector<TrainSample> out;
    std::vector<std::string> missing;
    for (const CaseRecord& cr : split.cases) {
        for (const ClipRecord& clip : cr.clips) {
            for (size_t pi = 0; pi < clip.frames.size(); ++pi) {
                const FrameRecord& fr = clip.frames[pi];
                TrainSample s;
                s.image = read_image_png(split.root + "/" + fr.image_path);
                if (s.image.channels != 3)
                    throw ValidationError(fr.image_path + ": training frames must be RGB");
                s.mask = remap_mask(read_mask_png(split.root + "/" + fr.mask_path), map);
                if (s.mask.width != s.image.width || s.mask.height != s.image.height)
                    throw ValidationError(fr.mask_path + ": mask size differs from its frame");

                if (variant.uses_flow()) {
                    const auto ref = reference_index(pi, clip.frames.size(), *variant.pairing);
                    if (!ref) {
                        s.flow = zero_field(s.image.width, s.image.height);
                    } else {
                        const std::string flo = paths.flo_path(variant.pairing->offset, cr.case_id,
                                                               clip.clip_id, fr.index);
                        if (!fs::exists(flo)) {
                            missing.push_back(flo);
                        } else {
                            FlowField f = read_flo(flo);
                            if (f.width != s.image.width || f.height != s.image.height)
                                f = rescale_flow(f, s.image.width, s.image.height);
                            s.flow = std::move(f);
                        }
                    }
                }
                out.push_back(std::move(s));
            }
        }
    }
    if (!missing.empty()) {
        std::string msg = "variant " + variant.name + " needs " + std::to_string(missing.size()) +
                          " flow artifacts that are not on disk (run the flow stage first):";
        const size_t show = std::min<size_t>(missing.size(), 5);
        for (size_t i = 0; i < show; ++i) msg += "\n  " + missing[i];
        if (missing.size() > show) msg += "\n  ...";
        throw MissingArtifactError(msg);
    }
    return out;
}

Tensor<float> encode_channels(const Image& rgb, const FlowField* flow, const VariantSpec& variant,
                              const NormalizationPolicy& norm) {
    if (rgb.channels != 3) throw ValidationError("encode_channels expects an RGB image");
    const int channels = variant.channels();
    Tensor<float> x(1, channels, rgb.height, rgb.width);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < rgb.height; ++y)
            for (int xx = 0; xx < rgb.width; ++xx) x.at(0, c, y, xx) = rgb.at(xx, y, c);
    if (variant.uses_flow()) {
        if (!flow) throw ValidationError("variant " + variant.name + " needs a flow field");
        if (flow->width != rgb.width || flow->height != rgb.height)
            throw ValidationError("flow field size differs from the frame");
        const FlowEncoding enc = encode_flow(*flow, *variant.encoding, norm);
        for (int c = 0; c < enc.planes.channels; ++c)
            for (int y = 0; y < rgb.height; ++y)
                for (int xx = 0; xx < rgb.width; ++xx)
                    x.at(0, 3 + c, y, xx) = enc.planes.at(xx, y, c);
    }
    return x;
}

ChannelStats compute_channel_stats(const std::vector<TrainSample>& samples,
                                   const VariantSpec& variant, const NormalizationPolicy& norm) {
    if (samples.empty()) throw ValidationError("channel statistics need at least one sample");
    const int channels = variant.channels();
    std::vector<double> sum(channels, 0.0), sumsq(channels, 0.0);
    std::vector<size_t> count(channels, 0);
    for (const TrainSample& s : samples) {
        const Tensor<float> x =
            encode_channels(s.image, s.flow ? &*s.flow : nullptr, variant, norm);
        for (int c = 0; c < channels; ++c) {
            const size_t base = x.index(0, c, 0, 0);
            const size_t plane = static_cast<size_t>(x.h) * x.w;
            for (size_t i = 0; i < plane; ++i) {
                const double v = x.data[base + i];
                sum[c] += v;
                sumsq[c] += v * v;
            }
            count[c] += plane;
        }
    }
    ChannelStats st;
    for (int c = 0; c < channels; ++c) {
        const double mean = sum[c] / static_cast<double>(count[c]);
        double var = sumsq[c] / static_cast<double>(count[c]) - mean * mean;
        var = std::max(var, 1e-8);
        st.mean.push_back(mean);
        st.stdev.push_back(std::sqrt(var));
    }
    return st;
}

namespace {

void copy_window(const Tensor<float>& src, Tensor<float>& dst, int item, int cx, int cy) {
    for (int c = 0; c < src.c; ++c)
        for (int y = 0; y < dst.h; ++y)
            for (int x = 0; x < dst.w; ++x) dst.at(item, c, y, x) = src.at(0, c, cy + y, cx + x);
}

std::vector<size_t> shuffled_order(size_t n, util::Rng& rng) {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    for (size_t i = n; i > 1; --i) {
        const size_t j = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(i) - 1));
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

// Largest stride-aligned center window of one sample, encoded and normalized.
struct EvalInput {
    Tensor<float> x;
    LabelMask gt;
};

EvalInput eval_input(const TrainSample& s, const VariantSpec& variant,
                     const NormalizationPolicy& norm, const ChannelStats& stats, int stride) {
    const int w2 = (s.image.width / stride) * stride;
    const int h2 = (s.image.height / stride) * stride;
    if (w2 == 0 || h2 == 0)
        throw ValidationError("frame smaller than the network stride");
    Tensor<float> full = encode_channels(s.image, s.flow ? &*s.flow : nullptr, variant, norm);
    normalize_inputs(full, stats);
    const int cx = (s.image.width - w2) / 2;
    const int cy = (s.image.height - h2) / 2;
    EvalInput e{Tensor<float>(1, full.c, h2, w2), crop(s.mask, cx, cy, w2, h2)};
    copy_window(full, e.x, 0, cx, cy);
    return e;
}

} // namespace

RunResult train_one(const std::vector<TrainSample>& train, const std::vector<TrainSample>& val,
                    const VariantSpec& variant, const NormalizationPolicy& norm,
                    const ChannelStats& stats, const NetworkConfig& nc, const TrainConfig& tc,
                    const AugmentRanges& aug, uint64_t run_seed) {
    validate_train_config(tc);
    validate_ranges(aug);
    if (train.empty()) throw ValidationError("training split is empty");

    NetworkConfig cfg = nc;
    cfg.in_channels = variant.channels();
    cfg.seed = util::derive_seed(run_seed, "init");
    validate_network_config(cfg);
    const int stride = 1 << (cfg.depth - 1);
    if (tc.crop % stride != 0)
        throw ValidationError("training crop must be a multiple of the pooling stride " +
                              std::to_string(stride));
    for (const TrainSample& s : train)
        if (s.image.width < tc.crop || s.image.height < tc.crop)
            throw ValidationError("training crop exceeds a frame");

    UNet<float> net(cfg);
    net.set_stats(stats);
    const LossWeights lw{tc.dice_weight, tc.ce_weight};

    RunResult result{std::move(net), {}, 0};
    UNet<float>& model = result.model;
    std::vector<Tensor<float>> best_params;
    double best_val = std::numeric_limits<double>::infinity();

    for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
        util::Rng order_rng(util::derive_seed(run_seed, "order/" + std::to_string(epoch)));
        const std::vector<size_t> order = shuffled_order(train.size(), order_rng);

        double loss_sum = 0.0;
        for (size_t start = 0; start < order.size(); start += tc.batch_size) {
            const int bs = static_cast<int>(
                std::min<size_t>(tc.batch_size, order.size() - start));
            Tensor<float> batch(bs, cfg.in_channels, tc.crop, tc.crop);
            std::vector<LabelMask> targets;
            for (int bi = 0; bi < bs; ++bi) {
                const size_t idx = order[start + bi];
                const TrainSample& s = train[idx];
                const uint64_t sseed = util::derive_seed(
                    run_seed, "sample/" + std::to_string(epoch) + "/" + std::to_string(idx));

                const GeomTransform t =
                    sample_transform(util::derive_seed(sseed, "aug"), aug);
                const AugmentedSample as = augment_sample(
                    t, s.image, s.mask, s.flow ? &*s.flow : nullptr, aug.elastic_on_flow);

                Tensor<float> xi =
                    encode_channels(as.image, as.flow ? &*as.flow : nullptr, variant, norm);
                normalize_inputs(xi, stats);

                util::Rng crop_rng(util::derive_seed(sseed, "crop"));
                const int cx =
                    static_cast<int>(crop_rng.uniform_int(0, s.image.width - tc.crop));
                const int cy =
                    static_cast<int>(crop_rng.uniform_int(0, s.image.height - tc.crop));
                copy_window(xi, batch, bi, cx, cy);
                targets.push_back(crop(as.mask, cx, cy, tc.crop, tc.crop));
            }

            const Tensor<float> logits = model.forward(batch);
            const LossResult<float> L = dice_ce_loss(logits, targets, lw);
            model.zero_grad();
            model.backward(L.dlogits);
            model.sgd_step(tc.learning_rate, tc.momentum);
            loss_sum += L.loss * bs;
        }

        EpochStats es;
        es.train_loss = loss_sum / static_cast<double>(train.size());

        if (val.empty()) {
            es.val_loss = es.train_loss;
        } else {
            double vsum = 0.0;
            for (const TrainSample& s : val) {
                EvalInput e = eval_input(s, variant, norm, stats, stride);
                const Tensor<float> logits = model.forward(e.x);
                vsum += dice_ce_loss(logits, {e.gt}, lw).loss;
            }
            es.val_loss = vsum / static_cast<double>(val.size());
        }
        result.history.push_back(es);

        if (es.val_loss < best_val) {
            best_val = es.val_loss;
            result.best_epoch = epoch;
            best_params.clear();
            for (const Param<float>& p : model.params()) best_params.push_back(p.value);
        }
    }

    for (size_t i = 0; i < best_params.size(); ++i) model.params()[i].value = best_params[i];
    return result;
}

MetricsRecord evaluate_samples(UNet<float>& model, const std::vector<TrainSample>& test,
                               const VariantSpec& variant, const NormalizationPolicy& norm) {
    if (test.empty()) throw ValidationError("evaluation split is empty");
    const int stride = 1 << (model.config().depth - 1);
    MetricsAccumulator acc;
    for (const TrainSample& s : test) {
        EvalInput e = eval_input(s, variant, norm, model.stats(), stride);
        const Tensor<float> logits = model.forward(e.x);
        acc.add_frame(predict_mask(logits, 0), e.gt);
    }
    return acc.finalize();
}

} // namespace flowseg
