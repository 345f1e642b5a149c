#include "flowseg/reference.hpp"

#include <algorithm>
#include <cmath>

namespace flowseg::reference {

Image resize_bilinear(const Image& src, int out_w, int out_h) {
    if (src.width <= 0 || src.height <= 0) throw ValidationError("reference resize: empty input");
    if (out_w <= 0 || out_h <= 0) throw ValidationError("reference resize: bad target");

    Image out(out_w, out_h, src.channels);
    const double sx = static_cast<double>(src.width) / out_w;
    const double sy = static_cast<double>(src.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        double wy = fy - y0;
        int y1 = std::clamp(y0 + 1, 0, src.height - 1);
        y0 = std::clamp(y0, 0, src.height - 1);
        for (int x = 0; x < out_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            double wx = fx - x0;
            int x1 = std::clamp(x0 + 1, 0, src.width - 1);
            x0 = std::clamp(x0, 0, src.width - 1);
            for (int c = 0; c < src.channels; ++c) {
                double top = src.at(x0, y0, c) + wx * (src.at(x1, y0, c) - src.at(x0, y0, c));
                double bot = src.at(x0, y1, c) + wx * (src.at(x1, y1, c) - src.at(x0, y1, c));
                out.at(x, y, c) = static_cast<float>(top + wy * (bot - top));
            }
        }
    }
    return out;
}

Image luminance(const Image& src) {
    if (src.channels == 1) return src;
    if (src.channels != 3) throw ValidationError("reference luminance: expects 1 or 3 channels");
    Image out(src.width, src.height, 1);
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x)
            out.at(x, y, 0) = static_cast<float>(
                0.299 * src.at(x, y, 0) + 0.587 * src.at(x, y, 1) + 0.114 * src.at(x, y, 2));
    return out;
}

Image gaussian_blur5(const Image& src) {
    static constexpr double k[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
    const int w = src.width, h = src.height, c = src.channels;
    Image tmp(w, h, c);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int ch = 0; ch < c; ++ch) {
                double acc = 0.0;
                for (int t = -2; t <= 2; ++t)
                    acc += k[t + 2] * src.at(std::clamp(x + t, 0, w - 1), y, ch);
                tmp.at(x, y, ch) = static_cast<float>(acc);
            }
    Image out(w, h, c);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int ch = 0; ch < c; ++ch) {
                double acc = 0.0;
                for (int t = -2; t <= 2; ++t)
                    acc += k[t + 2] * tmp.at(x, std::clamp(y + t, 0, h - 1), ch);
                out.at(x, y, ch) = static_cast<float>(acc);
            }
    return out;
}

namespace {

float sample_clamped(const Image& img, double x, double y) {
    int x0 = static_cast<int>(std::floor(x));
    int y0 = static_cast<int>(std::floor(y));
    double wx = x - x0;
    double wy = y - y0;
    int x1 = std::clamp(x0 + 1, 0, img.width - 1);
    int y1 = std::clamp(y0 + 1, 0, img.height - 1);
    x0 = std::clamp(x0, 0, img.width - 1);
    y0 = std::clamp(y0, 0, img.height - 1);
    double top = img.at(x0, y0, 0) + wx * (img.at(x1, y0, 0) - img.at(x0, y0, 0));
    double bot = img.at(x0, y1, 0) + wx * (img.at(x1, y1, 0) - img.at(x0, y1, 0));
    return static_cast<float>(top + wy * (bot - top));
}

} // namespace

Image warp_by_flow(const Image& src, const FlowField& flow) {
    if (src.channels != 1) throw ValidationError("reference warp: single-channel only");
    Image out(src.width, src.height, 1);
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x) {
            size_t i = flow.idx(x, y);
            out.at(x, y, 0) = sample_clamped(src, x + static_cast<double>(flow.u[i]),
                                             y + static_cast<double>(flow.v[i]));
        }
    return out;
}

void hs_sweep(const detail::HsLinearization& lin, double alpha2, const std::vector<double>& u_in,
              const std::vector<double>& v_in, std::vector<double>& u_out,
              std::vector<double>& v_out) {
    const int w = lin.width, h = lin.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t i = static_cast<size_t>(y) * w + x;
            double su = 0.0, sv = 0.0, wsum = 0.0;
            if (x > 0) { su += u_in[i - 1]; sv += v_in[i - 1]; wsum += 1.0; }
            if (x + 1 < w) { su += u_in[i + 1]; sv += v_in[i + 1]; wsum += 1.0; }
            if (y > 0) { su += u_in[i - w]; sv += v_in[i - w]; wsum += 1.0; }
            if (y + 1 < h) { su += u_in[i + w]; sv += v_in[i + w]; wsum += 1.0; }
            const double W = wsum * 0.25;
            const double ubar = su / wsum;
            const double vbar = sv / wsum;
            const double ix = lin.ix[i], iy = lin.iy[i];
            const double t =
                (ix * ubar + iy * vbar + lin.c[i]) / (alpha2 * W + ix * ix + iy * iy);
            u_out[i] = ubar - ix * t;
            v_out[i] = vbar - iy * t;
        }
    }
}

double hs_energy(const detail::HsLinearization& lin, double alpha2, const std::vector<double>& u,
                 const std::vector<double>& v) {
    const int w = lin.width, h = lin.height;
    double total = 0.0;
    for (int y = 0; y < h; ++y) {
        double acc = 0.0;
        for (int x = 0; x < w; ++x) {
            const size_t i = static_cast<size_t>(y) * w + x;
            const double r = lin.ix[i] * u[i] + lin.iy[i] * v[i] + lin.c[i];
            acc += r * r;
            if (x + 1 < w) {
                const double du = u[i + 1] - u[i], dv = v[i + 1] - v[i];
                acc += alpha2 * 0.25 * (du * du + dv * dv);
            }
            if (y + 1 < h) {
                const double du = u[i + w] - u[i], dv = v[i + w] - v[i];
                acc += alpha2 * 0.25 * (du * du + dv * dv);
            }
        }
        total += acc;
    }
    return total;
}

void conv3x3_forward(const std::vector<float>& in, int in_c, int h, int w,
                     const std::vector<float>& weights, const std::vector<float>& bias, int out_c,
                     std::vector<float>& out) {
    out.assign(static_cast<size_t>(out_c) * h * w, 0.0f);
    for (int oc = 0; oc < out_c; ++oc)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double acc = bias[oc];
                for (int ic = 0; ic < in_c; ++ic)
                    for (int ky = -1; ky <= 1; ++ky)
                        for (int kx = -1; kx <= 1; ++kx) {
                            const int yy = y + ky, xx = x + kx;
                            if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
                            const size_t wi =
                                ((static_cast<size_t>(oc) * in_c + ic) * 3 + (ky + 1)) * 3 +
                                (kx + 1);
                            acc += static_cast<double>(weights[wi]) *
                                   in[(static_cast<size_t>(ic) * h + yy) * w + xx];
                        }
                out[(static_cast<size_t>(oc) * h + y) * w + x] = static_cast<float>(acc);
            }
}

} // namespace flowseg::reference
