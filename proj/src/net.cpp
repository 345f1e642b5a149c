#include "flowseg/net.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace flowseg {

void validate_network_config(const NetworkConfig& c) {
    if (c.in_channels != 3 && c.in_channels != 5 && c.in_channels != 6)
        throw ValidationError("network input channels must be 3 (RGB), 5 (RGB + two flow planes), "
                              "or 6 (RGB + RGBof)");
    if (c.classes < 2) throw ValidationError("network needs at least two classes");
    if (c.depth < 1 || c.depth > 6) throw ValidationError("network depth must be in [1, 6]");
    if (c.base_width < 1 || c.base_width > 1024)
        throw ValidationError("network base width must be in [1, 1024]");
}

template <typename T>
void normalize_inputs(Tensor<T>& batch, const ChannelStats& stats) {
    if (stats.mean.size() != static_cast<size_t>(batch.c) || stats.stdev.size() != stats.mean.size())
        throw ValidationError("channel statistics do not match the batch channel count");
    for (int i = 0; i < batch.n; ++i)
        for (int ch = 0; ch < batch.c; ++ch) {
            const double m = stats.mean[ch];
            const double s = stats.stdev[ch];
            T* plane = &batch.at(i, ch, 0, 0);
            const size_t count = static_cast<size_t>(batch.h) * batch.w;
            for (size_t k = 0; k < count; ++k)
                plane[k] = static_cast<T>((plane[k] - m) / s);
        }
}

namespace {

template <typename T>
void conv3x3_fwd(const Tensor<T>& in, const Tensor<T>& w, const Tensor<T>& b, Tensor<T>& out) {
    const int oc = w.n, ic = w.c, h = in.h, wd = in.w;
    for (int i = 0; i < in.n; ++i) {
#pragma omp parallel for schedule(static)
        for (int o = 0; o < oc; ++o)
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < wd; ++x) {
                    double acc = b.data[o];
                    for (int c = 0; c < ic; ++c)
                        for (int ky = -1; ky <= 1; ++ky) {
                            const int yy = y + ky;
                            if (yy < 0 || yy >= h) continue;
                            for (int kx = -1; kx <= 1; ++kx) {
                                const int xx = x + kx;
                                if (xx < 0 || xx >= wd) continue;
                                acc += static_cast<double>(w.at(o, c, ky + 1, kx + 1)) *
                                       in.at(i, c, yy, xx);
                            }
                        }
                    out.at(i, o, y, x) = static_cast<T>(acc);
                }
    }
}

// Gradients w.r.t. weights/bias accumulate into wg/bg; returns grad w.r.t. in.
template <typename T>
Tensor<T> conv3x3_bwd(const Tensor<T>& in, const Tensor<T>& w, Tensor<T>& wg, Tensor<T>& bg,
                      const Tensor<T>& dout) {
    const int oc = w.n, ic = w.c, h = in.h, wd = in.w;
    Tensor<T> din(in.n, in.c, h, wd);
    for (int i = 0; i < in.n; ++i) {
#pragma omp parallel for schedule(static)
        for (int o = 0; o < oc; ++o) {
            double bacc = 0.0;
            for (int c = 0; c < ic; ++c)
                for (int ky = -1; ky <= 1; ++ky)
                    for (int kx = -1; kx <= 1; ++kx) {
                        double wacc = 0.0;
                        for (int y = 0; y < h; ++y) {
                            const int yy = y + ky;
                            if (yy < 0 || yy >= h) continue;
                            for (int x = 0; x < wd; ++x) {
                                const int xx = x + kx;
                                if (xx < 0 || xx >= wd) continue;
                                wacc += static_cast<double>(dout.at(i, o, y, x)) * in.at(i, c, yy, xx);
                            }
                        }
                        wg.at(o, c, ky + 1, kx + 1) += static_cast<T>(wacc);
                    }
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < wd; ++x) bacc += dout.at(i, o, y, x);
            bg.data[o] += static_cast<T>(bacc);
        }
#pragma omp parallel for schedule(static)
        for (int c = 0; c < ic; ++c)
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < wd; ++x) {
                    double acc = 0.0;
                    for (int o = 0; o < oc; ++o)
                        for (int ky = -1; ky <= 1; ++ky) {
                            const int yy = y - ky;
                            if (yy < 0 || yy >= h) continue;
                            for (int kx = -1; kx <= 1; ++kx) {
                                const int xx = x - kx;
                                if (xx < 0 || xx >= wd) continue;
                                acc += static_cast<double>(w.at(o, c, ky + 1, kx + 1)) *
                                       dout.at(i, o, yy, xx);
                            }
                        }
                    din.at(i, c, y, x) = static_cast<T>(acc);
                }
    }
    return din;
}

template <typename T>
void conv1x1_fwd(const Tensor<T>& in, const Tensor<T>& w, const Tensor<T>& b, Tensor<T>& out) {
    const int oc = w.n, ic = w.c;
    for (int i = 0; i < in.n; ++i)
#pragma omp parallel for schedule(static)
        for (int o = 0; o < oc; ++o)
            for (int y = 0; y < in.h; ++y)
                for (int x = 0; x < in.w; ++x) {
                    double acc = b.data[o];
                    for (int c = 0; c < ic; ++c)
                        acc += static_cast<double>(w.at(o, c, 0, 0)) * in.at(i, c, y, x);
                    out.at(i, o, y, x) = static_cast<T>(acc);
                }
}

template <typename T>
Tensor<T> conv1x1_bwd(const Tensor<T>& in, const Tensor<T>& w, Tensor<T>& wg, Tensor<T>& bg,
                      const Tensor<T>& dout) {
    const int oc = w.n, ic = w.c;
    Tensor<T> din(in.n, in.c, in.h, in.w);
    for (int i = 0; i < in.n; ++i) {
        for (int o = 0; o < oc; ++o) {
            double bacc = 0.0;
            for (int c = 0; c < ic; ++c) {
                double wacc = 0.0;
                for (int y = 0; y < in.h; ++y)
                    for (int x = 0; x < in.w; ++x)
                        wacc += static_cast<double>(dout.at(i, o, y, x)) * in.at(i, c, y, x);
                wg.at(o, c, 0, 0) += static_cast<T>(wacc);
            }
            for (int y = 0; y < in.h; ++y)
                for (int x = 0; x < in.w; ++x) bacc += dout.at(i, o, y, x);
            bg.data[o] += static_cast<T>(bacc);
        }
#pragma omp parallel for schedule(static)
        for (int c = 0; c < ic; ++c)
            for (int y = 0; y < in.h; ++y)
                for (int x = 0; x < in.w; ++x) {
                    double acc = 0.0;
                    for (int o = 0; o < oc; ++o)
                        acc += static_cast<double>(w.at(o, c, 0, 0)) * dout.at(i, o, y, x);
                    din.at(i, c, y, x) = static_cast<T>(acc);
                }
    }
    return din;
}

template <typename T>
void relu_inplace(Tensor<T>& t) {
    for (T& v : t.data)
        if (v < T(0)) v = T(0);
}

// Zeroes grad entries whose activation was clipped. `act` holds post-ReLU
// values, so "clipped" is exactly act == 0.
template <typename T>
void relu_bwd(Tensor<T>& grad, const Tensor<T>& act) {
    for (size_t i = 0; i < grad.data.size(); ++i)
        if (act.data[i] <= T(0)) grad.data[i] = T(0);
}

// 2x2 stride-2 max pooling; ties keep the first element in scan order.
template <typename T>
Tensor<T> maxpool2(const Tensor<T>& in, std::vector<uint32_t>& idx) {
    if (in.h % 2 != 0 || in.w % 2 != 0)
        throw ValidationError("max pooling needs even feature dimensions");
    Tensor<T> out(in.n, in.c, in.h / 2, in.w / 2);
    idx.resize(out.size());
    size_t o = 0;
    for (int i = 0; i < in.n; ++i)
        for (int c = 0; c < in.c; ++c)
            for (int y = 0; y < out.h; ++y)
                for (int x = 0; x < out.w; ++x, ++o) {
                    size_t best = in.index(i, c, 2 * y, 2 * x);
                    T best_v = in.data[best];
                    for (int k = 1; k < 4; ++k) {
                        const size_t cand =
                            in.index(i, c, 2 * y + k / 2, 2 * x + k % 2);
                        if (in.data[cand] > best_v) {
                            best = cand;
                            best_v = in.data[cand];
                        }
                    }
                    out.data[o] = best_v;
                    idx[o] = static_cast<uint32_t>(best);
                }
    return out;
}

template <typename T>
Tensor<T> maxpool2_bwd(const Tensor<T>& dout, const std::vector<uint32_t>& idx, int in_h,
                       int in_w) {
    Tensor<T> din(dout.n, dout.c, in_h, in_w);
    for (size_t o = 0; o < dout.data.size(); ++o) din.data[idx[o]] += dout.data[o];
    return din;
}

template <typename T>
Tensor<T> upsample2(const Tensor<T>& in) {
    Tensor<T> out(in.n, in.c, in.h * 2, in.w * 2);
    for (int i = 0; i < in.n; ++i)
        for (int c = 0; c < in.c; ++c)
            for (int y = 0; y < out.h; ++y)
                for (int x = 0; x < out.w; ++x)
                    out.at(i, c, y, x) = in.at(i, c, y / 2, x / 2);
    return out;
}

template <typename T>
Tensor<T> upsample2_bwd(const Tensor<T>& dout) {
    Tensor<T> din(dout.n, dout.c, dout.h / 2, dout.w / 2);
    for (int i = 0; i < dout.n; ++i)
        for (int c = 0; c < dout.c; ++c)
            for (int y = 0; y < dout.h; ++y)
                for (int x = 0; x < dout.w; ++x)
                    din.at(i, c, y / 2, x / 2) += dout.at(i, c, y, x);
    return din;
}

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
    Tensor<T> out(a.n, a.c + b.c, a.h, a.w);
    for (int i = 0; i < a.n; ++i) {
        for (int c = 0; c < a.c; ++c)
            std::copy_n(&a.at(i, c, 0, 0), static_cast<size_t>(a.h) * a.w, &out.at(i, c, 0, 0));
        for (int c = 0; c < b.c; ++c)
            std::copy_n(&b.at(i, c, 0, 0), static_cast<size_t>(b.h) * b.w,
                        &out.at(i, a.c + c, 0, 0));
    }
    return out;
}

template <typename T>
void split_channels(const Tensor<T>& cat, int first_c, Tensor<T>& a, Tensor<T>& b) {
    a = Tensor<T>(cat.n, first_c, cat.h, cat.w);
    b = Tensor<T>(cat.n, cat.c - first_c, cat.h, cat.w);
    for (int i = 0; i < cat.n; ++i) {
        for (int c = 0; c < first_c; ++c)
            std::copy_n(&cat.at(i, c, 0, 0), static_cast<size_t>(cat.h) * cat.w,
                        &a.at(i, c, 0, 0));
        for (int c = first_c; c < cat.c; ++c)
            std::copy_n(&cat.at(i, c, 0, 0), static_cast<size_t>(cat.h) * cat.w,
                        &b.at(i, c - first_c, 0, 0));
    }
}

} // namespace

template <typename T>
struct UNet<T>::Cache {
    std::vector<Tensor<T>> enc_in, enc_mid, enc_out;
    std::vector<std::vector<uint32_t>> pool_idx;
    std::vector<Tensor<T>> dec_cat, dec_mid, dec_out;
};

template <typename T>
UNet<T>::UNet(const NetworkConfig& cfg) : cfg_(cfg) {
    validate_network_config(cfg);

    auto add_conv = [&](const std::string& name, int oc, int ic, int k) {
        Param<T> w;
        w.name = name + ".w";
        w.value = Tensor<T>(oc, ic, k, k);
        w.grad = Tensor<T>(oc, ic, k, k);
        w.velocity = Tensor<T>(oc, ic, k, k);
        util::Rng rng(util::derive_seed(cfg_.seed, w.name));
        const double stdev = std::sqrt(2.0 / (static_cast<double>(ic) * k * k));
        for (T& v : w.value.data) v = static_cast<T>(rng.normal() * stdev);
        params_.push_back(std::move(w));

        Param<T> b;
        b.name = name + ".b";
        b.value = Tensor<T>(oc, 1, 1, 1);
        b.grad = Tensor<T>(oc, 1, 1, 1);
        b.velocity = Tensor<T>(oc, 1, 1, 1);
        params_.push_back(std::move(b));
    };

    for (int level = 0; level < cfg_.depth; ++level) {
        const int in_c = level == 0 ? cfg_.in_channels : width_at(level - 1);
        add_conv("enc" + std::to_string(level) + ".conv0", width_at(level), in_c, 3);
        add_conv("enc" + std::to_string(level) + ".conv1", width_at(level), width_at(level), 3);
    }
    for (int level = cfg_.depth - 2; level >= 0; --level) {
        const int cat_c = width_at(level + 1) + width_at(level);
        add_conv("dec" + std::to_string(level) + ".conv0", width_at(level), cat_c, 3);
        add_conv("dec" + std::to_string(level) + ".conv1", width_at(level), width_at(level), 3);
    }
    add_conv("head", cfg_.classes, width_at(0), 1);
}

template <typename T>
size_t UNet<T>::parameter_count() const {
    size_t n = 0;
    for (const auto& p : params_) n += p.value.size();
    return n;
}

template <typename T>
void UNet<T>::zero_grad() {
    for (auto& p : params_) p.grad.zero();
}

template <typename T>
void UNet<T>::sgd_step(double lr, double momentum) {
    for (auto& p : params_)
        for (size_t i = 0; i < p.value.size(); ++i) {
            p.velocity.data[i] =
                static_cast<T>(momentum * p.velocity.data[i] - lr * p.grad.data[i]);
            p.value.data[i] += p.velocity.data[i];
        }
}

template <typename T>
Tensor<T> UNet<T>::forward(const Tensor<T>& batch) {
    if (batch.c != cfg_.in_channels)
        throw ValidationError("batch has " + std::to_string(batch.c) + " channels, network expects " +
                              std::to_string(cfg_.in_channels));
    const int div = 1 << (cfg_.depth - 1);
    if (batch.h % div != 0 || batch.w % div != 0)
        throw ValidationError("input dimensions must be divisible by " + std::to_string(div));

    cache_ = std::make_shared<Cache>();
    Cache& cc = *cache_;
    cc.enc_in.resize(cfg_.depth);
    cc.enc_mid.resize(cfg_.depth);
    cc.enc_out.resize(cfg_.depth);
    cc.pool_idx.resize(std::max(0, cfg_.depth - 1));
    cc.dec_cat.resize(std::max(0, cfg_.depth - 1));
    cc.dec_mid.resize(std::max(0, cfg_.depth - 1));
    cc.dec_out.resize(std::max(0, cfg_.depth - 1));

    Tensor<T> x = batch;
    for (int level = 0; level < cfg_.depth; ++level) {
        cc.enc_in[level] = x;
        Tensor<T> mid(x.n, width_at(level), x.h, x.w);
        conv3x3_fwd(x, param(4 * level).value, param(4 * level + 1).value, mid);
        relu_inplace(mid);
        cc.enc_mid[level] = mid;
        Tensor<T> out(x.n, width_at(level), x.h, x.w);
        conv3x3_fwd(mid, param(4 * level + 2).value, param(4 * level + 3).value, out);
        relu_inplace(out);
        cc.enc_out[level] = out;
        if (level < cfg_.depth - 1) x = maxpool2(out, cc.pool_idx[level]);
    }

    Tensor<T> d = cc.enc_out[cfg_.depth - 1];
    for (int level = cfg_.depth - 2; level >= 0; --level) {
        const size_t base = 4 * static_cast<size_t>(cfg_.depth) +
                            4 * static_cast<size_t>(cfg_.depth - 2 - level);
        Tensor<T> cat = concat_channels(upsample2(d), cc.enc_out[level]);
        cc.dec_cat[level] = cat;
        Tensor<T> mid(cat.n, width_at(level), cat.h, cat.w);
        conv3x3_fwd(cat, param(base).value, param(base + 1).value, mid);
        relu_inplace(mid);
        cc.dec_mid[level] = mid;
        Tensor<T> out(cat.n, width_at(level), cat.h, cat.w);
        conv3x3_fwd(mid, param(base + 2).value, param(base + 3).value, out);
        relu_inplace(out);
        cc.dec_out[level] = out;
        d = out;
    }

    const size_t head = params_.size() - 2;
    Tensor<T> logits(d.n, cfg_.classes, d.h, d.w);
    conv1x1_fwd(d, param(head).value, param(head + 1).value, logits);
    return logits;
}

template <typename T>
void UNet<T>::backward(const Tensor<T>& dlogits) {
    if (!cache_) throw ValidationError("backward called without a cached forward pass");
    Cache& cc = *cache_;

    const size_t head = params_.size() - 2;
    const Tensor<T>& head_in =
        cfg_.depth == 1 ? cc.enc_out[0] : cc.dec_out[0];
    Tensor<T> d = conv1x1_bwd(head_in, param(head).value, param(head).grad, param(head + 1).grad,
                              dlogits);

    std::vector<Tensor<T>> skip_grad(cfg_.depth);
    for (int level = 0; level <= cfg_.depth - 2; ++level) {
        const size_t base = 4 * static_cast<size_t>(cfg_.depth) +
                            4 * static_cast<size_t>(cfg_.depth - 2 - level);
        relu_bwd(d, cc.dec_out[level]);
        Tensor<T> dmid = conv3x3_bwd(cc.dec_mid[level], param(base + 2).value,
                                     param(base + 2).grad, param(base + 3).grad, d);
        relu_bwd(dmid, cc.dec_mid[level]);
        Tensor<T> dcat = conv3x3_bwd(cc.dec_cat[level], param(base).value, param(base).grad,
                                     param(base + 1).grad, dmid);
        Tensor<T> dup, dskip;
        split_channels(dcat, width_at(level + 1), dup, dskip);
        skip_grad[level] = std::move(dskip);
        d = upsample2_bwd(dup);
    }

    for (int level = cfg_.depth - 1; level >= 0; --level) {
        Tensor<T> dout;
        if (level == cfg_.depth - 1) {
            dout = std::move(d);
        } else {
            dout = maxpool2_bwd(d, cc.pool_idx[level], cc.enc_out[level].h, cc.enc_out[level].w);
            for (size_t i = 0; i < dout.data.size(); ++i)
                dout.data[i] += skip_grad[level].data[i];
        }
        relu_bwd(dout, cc.enc_out[level]);
        Tensor<T> dmid = conv3x3_bwd(cc.enc_mid[level], param(4 * level + 2).value,
                                     param(4 * level + 2).grad, param(4 * level + 3).grad, dout);
        relu_bwd(dmid, cc.enc_mid[level]);
        d = conv3x3_bwd(cc.enc_in[level], param(4 * level).value, param(4 * level).grad,
                        param(4 * level + 1).grad, dmid);
    }
}

template <typename T>
LossResult<T> dice_ce_loss(const Tensor<T>& logits, const std::vector<LabelMask>& targets,
                           const LossWeights& weights) {
    if (targets.size() != static_cast<size_t>(logits.n))
        throw ValidationError("loss: one target mask per batch item required");
    for (const auto& t : targets)
        if (t.width != logits.w || t.height != logits.h)
            throw ValidationError("loss: target mask dimensions do not match the logits");

    const int classes = logits.c;
    const size_t pixels = static_cast<size_t>(logits.n) * logits.h * logits.w;
    constexpr double kSmooth = 1e-5;

    std::vector<double> probs(logits.size());
    std::vector<double> inter(classes, 0.0), psum(classes, 0.0), tsum(classes, 0.0);
    double ce = 0.0;

    for (int i = 0; i < logits.n; ++i)
        for (int y = 0; y < logits.h; ++y)
            for (int x = 0; x < logits.w; ++x) {
                double zmax = logits.at(i, 0, y, x);
                for (int c = 1; c < classes; ++c)
                    zmax = std::max(zmax, static_cast<double>(logits.at(i, c, y, x)));
                double denom = 0.0;
                for (int c = 0; c < classes; ++c)
                    denom += std::exp(static_cast<double>(logits.at(i, c, y, x)) - zmax);
                const int t = targets[i].at(x, y);
                if (t >= classes)
                    throw ValidationError("loss: target label " + std::to_string(t) +
                                          " out of range");
                for (int c = 0; c < classes; ++c) {
                    const double p =
                        std::exp(static_cast<double>(logits.at(i, c, y, x)) - zmax) / denom;
                    probs[logits.index(i, c, y, x)] = p;
                    psum[c] += p;
                    if (c == t) {
                        ce -= std::log(std::max(p, 1e-300));
                        inter[c] += p;
                        tsum[c] += 1.0;
                    }
                }
            }
    ce /= static_cast<double>(pixels);

    // Soft Dice over non-background classes present in the target or the
    // prediction mass.
    std::vector<char> included(classes, 0);
    std::vector<double> dice(classes, 0.0);
    int k = 0;
    double dice_sum = 0.0;
    for (int c = 1; c < classes; ++c) {
        if (tsum[c] == 0.0 && psum[c] == 0.0) continue;
        included[c] = 1;
        ++k;
        dice[c] = (2.0 * inter[c] + kSmooth) / (psum[c] + tsum[c] + kSmooth);
        dice_sum += dice[c];
    }
    const double dice_term = k > 0 ? 1.0 - dice_sum / k : 0.0;

    LossResult<T> res;
    res.ce = ce;
    res.dice = dice_term;
    res.loss = weights.ce_w * ce + weights.dice_w * dice_term;
    res.dlogits = Tensor<T>(logits.n, classes, logits.h, logits.w);

    // d(dice_c)/d p_c(x) = (2 t - dice_c * 1) ... expanded below; CE gradient
    // is the usual softmax minus one-hot, averaged over pixels.
    std::vector<double> g(classes);
    for (int i = 0; i < logits.n; ++i)
        for (int y = 0; y < logits.h; ++y)
            for (int x = 0; x < logits.w; ++x) {
                const int t = targets[i].at(x, y);
                double gdotp = 0.0;
                for (int c = 0; c < classes; ++c) {
                    g[c] = 0.0;
                    if (c >= 1 && included[c] && k > 0) {
                        const double u = psum[c] + tsum[c] + kSmooth;
                        const double tc = (c == t) ? 1.0 : 0.0;
                        const double ddice = (2.0 * tc * u - (2.0 * inter[c] + kSmooth)) / (u * u);
                        g[c] = -(weights.dice_w / k) * ddice;
                    }
                    gdotp += g[c] * probs[res.dlogits.index(i, c, y, x)];
                }
                for (int c = 0; c < classes; ++c) {
                    const double p = probs[res.dlogits.index(i, c, y, x)];
                    const double ce_part =
                        weights.ce_w * (p - (c == t ? 1.0 : 0.0)) / static_cast<double>(pixels);
                    const double dice_part = p * (g[c] - gdotp);
                    res.dlogits.at(i, c, y, x) = static_cast<T>(ce_part + dice_part);
                }
            }
    return res;
}

LabelMask predict_mask(const Tensor<float>& logits, int item) {
    if (item < 0 || item >= logits.n) throw ValidationError("predict: batch item out of range");
    LabelMask out(logits.w, logits.h);
    for (int y = 0; y < logits.h; ++y)
        for (int x = 0; x < logits.w; ++x) {
            int best = 0;
            float best_v = logits.at(item, 0, y, x);
            for (int c = 1; c < logits.c; ++c)
                if (logits.at(item, c, y, x) > best_v) {
                    best = c;
                    best_v = logits.at(item, c, y, x);
                }
            out.at(x, y) = static_cast<uint8_t>(best);
        }
    return out;
}

namespace {

constexpr char kCkptMagic[4] = {'F', 'S', 'C', 'K'};
constexpr uint32_t kCkptVersion = 1;

} // namespace

void save_checkpoint(const UNet<float>& net, const std::string& path) {
    std::vector<uint8_t> out;
    out.insert(out.end(), kCkptMagic, kCkptMagic + 4);
    util::put_u32le(out, kCkptVersion);
    const NetworkConfig& c = net.config();
    util::put_i32le(out, c.in_channels);
    util::put_i32le(out, c.classes);
    util::put_i32le(out, c.depth);
    util::put_i32le(out, c.base_width);
    util::put_u64le(out, c.seed);

    const ChannelStats& st = net.stats();
    if (st.mean.size() != st.stdev.size())
        throw ValidationError("checkpoint: malformed channel statistics");
    util::put_u32le(out, static_cast<uint32_t>(st.mean.size()));
    for (size_t i = 0; i < st.mean.size(); ++i) {
        util::put_f64le(out, st.mean[i]);
        util::put_f64le(out, st.stdev[i]);
    }

    util::put_u32le(out, static_cast<uint32_t>(net.params().size()));
    for (const auto& p : net.params()) {
        util::put_u32le(out, static_cast<uint32_t>(p.name.size()));
        out.insert(out.end(), p.name.begin(), p.name.end());
        util::put_u32le(out, static_cast<uint32_t>(p.value.n));
        util::put_u32le(out, static_cast<uint32_t>(p.value.c));
        util::put_u32le(out, static_cast<uint32_t>(p.value.h));
        util::put_u32le(out, static_cast<uint32_t>(p.value.w));
        for (float v : p.value.data) util::put_f32le(out, v);
    }
    util::write_file_bytes(path, out);
}

UNet<float> load_checkpoint(const std::string& path) {
    const std::vector<uint8_t> bytes = util::read_file_bytes(path);
    try {
        util::ByteReader r{bytes.data(), bytes.size()};
        char magic[4];
        r.bytes(magic, 4);
        if (std::memcmp(magic, kCkptMagic, 4) != 0)
            throw ValidationError("not a checkpoint file (bad magic)");
        const uint32_t version = r.u32le();
        if (version != kCkptVersion)
            throw ValidationError("unsupported checkpoint version " + std::to_string(version));

        NetworkConfig cfg;
        cfg.in_channels = r.i32le();
        cfg.classes = r.i32le();
        cfg.depth = r.i32le();
        cfg.base_width = r.i32le();
        cfg.seed = r.u64le();
        UNet<float> net(cfg);

        ChannelStats st;
        const uint32_t channels = r.u32le();
        if (channels > 64) throw ValidationError("checkpoint: absurd channel count");
        for (uint32_t i = 0; i < channels; ++i) {
            st.mean.push_back(r.f64le());
            st.stdev.push_back(r.f64le());
        }
        net.set_stats(std::move(st));

        const uint32_t count = r.u32le();
        if (count != net.params().size())
            throw ValidationError("checkpoint parameter count does not match the architecture");
        for (uint32_t i = 0; i < count; ++i) {
            const uint32_t name_len = r.u32le();
            if (name_len > 256) throw ValidationError("checkpoint: absurd parameter name");
            std::string name(name_len, '\0');
            r.bytes(name.data(), name_len);
            Param<float>& p = net.params()[i];
            if (name != p.name)
                throw ValidationError("checkpoint parameter '" + name + "' where '" + p.name +
                                      "' was expected");
            const uint32_t n = r.u32le(), c = r.u32le(), h = r.u32le(), w = r.u32le();
            if (static_cast<int>(n) != p.value.n || static_cast<int>(c) != p.value.c ||
                static_cast<int>(h) != p.value.h || static_cast<int>(w) != p.value.w)
                throw ValidationError("checkpoint tensor '" + name + "' has unexpected shape");
            for (float& v : p.value.data) v = r.f32le();
        }
        if (r.pos != r.size) throw ValidationError("checkpoint has trailing bytes");
        return net;
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

template void normalize_inputs<float>(Tensor<float>&, const ChannelStats&);
template void normalize_inputs<double>(Tensor<double>&, const ChannelStats&);
template class UNet<float>;
template class UNet<double>;
template LossResult<float> dice_ce_loss<float>(const Tensor<float>&,
                                               const std::vector<LabelMask>&, const LossWeights&);
template LossResult<double> dice_ce_loss<double>(const Tensor<double>&,
                                                 const std::vector<LabelMask>&,
                                                 const LossWeights&);

namespace detail {

void conv3x3_forward(const std::vector<float>& in, int in_c, int h, int w,
                     const std::vector<float>& weights, const std::vector<float>& bias, int out_c,
                     std::vector<float>& out) {
    if (in.size() != static_cast<size_t>(in_c) * h * w ||
        weights.size() != static_cast<size_t>(out_c) * in_c * 9 ||
        bias.size() != static_cast<size_t>(out_c))
        throw ValidationError("conv3x3_forward: buffer sizes do not match the given shape");
    Tensor<float> x(1, in_c, h, w);
    Tensor<float> wt(out_c, in_c, 3, 3);
    Tensor<float> bt(out_c, 1, 1, 1);
    Tensor<float> y(1, out_c, h, w);
    x.data = in;
    wt.data = weights;
    bt.data = bias;
    conv3x3_fwd(x, wt, bt, y);
    out = std::move(y.data);
}

} // namespace detail

} // namespace flowseg
