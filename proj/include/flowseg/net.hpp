#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "flowseg/raster.hpp"

namespace flowseg {

// Dense NCHW tensor. Templated so the training path runs in float while the
// gradient checker runs the identical code in double.
template <typename T>
struct Tensor {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<T> data;

    Tensor() = default;
    Tensor(int n_, int c_, int h_, int w_)
        : n(n_), c(c_), h(h_), w(w_),
          data(static_cast<size_t>(n_) * c_ * h_ * w_, T(0)) {
        if (n_ <= 0 || c_ <= 0 || h_ <= 0 || w_ <= 0)
            throw ValidationError("tensor dimensions must be positive");
    }

    size_t size() const { return data.size(); }
    size_t index(int i, int ch, int y, int x) const {
        return ((static_cast<size_t>(i) * c + ch) * h + y) * w + x;
    }
    T& at(int i, int ch, int y, int x) { return data[index(i, ch, y, x)]; }
    const T& at(int i, int ch, int y, int x) const { return data[index(i, ch, y, x)]; }
    void zero() { std::fill(data.begin(), data.end(), T(0)); }
    bool same_shape(const Tensor& o) const {
        return n == o.n && c == o.c && h == o.h && w == o.w;
    }
};

struct NetworkConfig {
    int in_channels = 3; // 3 = RGB, 5 = RGB + two flow planes, 6 = RGB + RGBof
    int classes = 3;
    int depth = 3;       // encoder levels
    int base_width = 16; // feature maps at the top level
    uint64_t seed = 0;   // weight initialization
};

void validate_network_config(const NetworkConfig& c);

// Per-channel standardization parameters measured on the training set and
// persisted with the model so inference reproduces training inputs exactly.
struct ChannelStats {
    std::vector<double> mean;
    std::vector<double> stdev; // variance floored at 1e-8 before the sqrt
};

// In-place (x - mean) / stdev per channel.
template <typename T>
void normalize_inputs(Tensor<T>& batch, const ChannelStats& stats);

template <typename T>
struct Param {
    std::string name;
    Tensor<T> value;
    Tensor<T> grad;
    Tensor<T> velocity; // SGD momentum buffer
};

// Small U-Net: per level two 3x3 convs + ReLU, 2x2 max pooling between
// encoder levels, nearest-neighbor upsampling with skip concatenation on the
// way back up, and a 1x1 head. Width doubles per level from base_width.
// Deterministic He initialization from the config seed.
template <typename T>
class UNet {
public:
    explicit UNet(const NetworkConfig& cfg);

    const NetworkConfig& config() const { return cfg_; }

    // Input height/width must be divisible by 2^(depth-1). Caches
    // activations for a following backward().
    Tensor<T> forward(const Tensor<T>& batch);

    // Accumulates parameter gradients from the cached forward pass.
    void backward(const Tensor<T>& dlogits);

    void zero_grad();
    void sgd_step(double lr, double momentum);

    std::vector<Param<T>>& params() { return params_; }
    const std::vector<Param<T>>& params() const { return params_; }
    size_t parameter_count() const;

    const ChannelStats& stats() const { return stats_; }
    void set_stats(ChannelStats s) { stats_ = std::move(s); }

private:
    struct LevelCache;

    int width_at(int level) const { return cfg_.base_width << level; }
    Param<T>& param(size_t idx) { return params_[idx]; }

    NetworkConfig cfg_;
    std::vector<Param<T>> params_;
    ChannelStats stats_;

    // Forward cache (valid between forward and backward).
    struct Cache;
    std::shared_ptr<Cache> cache_;
};

struct LossWeights {
    double dice_w = 1.0;
    double ce_w = 1.0;
};

template <typename T>
struct LossResult {
    double loss = 0.0;
    double ce = 0.0;
    double dice = 0.0; // the (1 - mean soft Dice) term
    Tensor<T> dlogits;
};

// Composite loss: ce_w * mean pixel cross-entropy + dice_w * (1 - mean soft
// Dice over non-background classes), smooth term 1e-5. A class absent from
// both the target and the prediction mass is skipped in the Dice mean.
template <typename T>
LossResult<T> dice_ce_loss(const Tensor<T>& logits, const std::vector<LabelMask>& targets,
                           const LossWeights& weights);

// Per-pixel argmax; ties go to the lowest class index.
LabelMask predict_mask(const Tensor<float>& logits, int item);

namespace detail {

// The OpenMP convolution the network runs on, exposed over planar (c, h, w)
// buffers for the parity tests and the benchmark. Weights are laid out
// (out_c, in_c, ky, kx).
void conv3x3_forward(const std::vector<float>& in, int in_c, int h, int w,
                     const std::vector<float>& weights, const std::vector<float>& bias, int out_c,
                     std::vector<float>& out);

} // namespace detail

// Versioned binary checkpoint: magic, network config, channel statistics,
// then named parameter tensors as little-endian float32.
void save_checkpoint(const UNet<float>& net, const std::string& path);
UNet<float> load_checkpoint(const std::string& path);

} // namespace flowseg
