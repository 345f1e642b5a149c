#include "flowseg/augment.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace flowseg {

void validate_transform(const GeomTransform& t) {
    if (!(std::isfinite(t.rotation) && t.rotation >= -M_PI && t.rotation <= M_PI))
        throw ValidationError("transform rotation must lie in [-pi, pi]");
    if (!(std::isfinite(t.scale) && t.scale > 0.0))
        throw ValidationError("transform scale must be positive");
    if (t.elastic && !(t.elastic->alpha_px >= 0.0 && t.elastic->sigma_px > 0.0))
        throw ValidationError("elastic params need alpha >= 0 and sigma > 0");
}

AugmentRanges AugmentRanges::disabled() {
    AugmentRanges r;
    r.rot_prob = r.scale_prob = r.mirror_prob = r.elastic_prob = 0.0;
    return r;
}

void validate_ranges(const AugmentRanges& r) {
    auto prob = [](double p, const char* what) {
        if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(std::string(what) + " must be in [0, 1]");
    };
    prob(r.rot_prob, "rotation probability");
    prob(r.scale_prob, "scale probability");
    prob(r.mirror_prob, "mirror probability");
    prob(r.elastic_prob, "elastic probability");
    if (!(r.rot_max_rad >= 0.0 && r.rot_max_rad <= M_PI))
        throw ValidationError("rotation range must be in [0, pi]");
    if (!(r.scale_lo > 0.0 && r.scale_hi >= r.scale_lo))
        throw ValidationError("scale range must satisfy 0 < lo <= hi");
    if (!(r.elastic.alpha_px >= 0.0 && r.elastic.sigma_px > 0.0))
        throw ValidationError("elastic params need alpha >= 0 and sigma > 0");
}

GeomTransform sample_transform(uint64_t seed, const AugmentRanges& r) {
    validate_ranges(r);
    GeomTransform t;
    {
        util::Rng rng(util::derive_seed(seed, "aug-rot"));
        if (rng.bernoulli(r.rot_prob)) t.rotation = rng.uniform(-r.rot_max_rad, r.rot_max_rad);
    }
    {
        util::Rng rng(util::derive_seed(seed, "aug-scale"));
        if (rng.bernoulli(r.scale_prob)) t.scale = rng.uniform(r.scale_lo, r.scale_hi);
    }
    {
        util::Rng rng(util::derive_seed(seed, "aug-mirror"));
        t.hflip = rng.bernoulli(r.mirror_prob);
        t.vflip = rng.bernoulli(r.mirror_prob);
    }
    {
        util::Rng rng(util::derive_seed(seed, "aug-elastic"));
        if (rng.bernoulli(r.elastic_prob)) {
            t.elastic = r.elastic;
            t.elastic_seed = util::derive_seed(seed, "aug-elastic-grid");
        }
    }
    validate_transform(t);
    return t;
}

namespace {

// Exact values at the multiples of pi/2 so quarter-turn transforms permute
// pixels instead of interpolating.
void snapped_trig(double angle, double& c, double& s) {
    c = std::cos(angle);
    s = std::sin(angle);
    if (std::abs(c) < 1e-12) c = 0.0;
    if (std::abs(s) < 1e-12) s = 0.0;
    if (std::abs(c - 1.0) < 1e-12) c = 1.0;
    if (std::abs(c + 1.0) < 1e-12) c = -1.0;
    if (std::abs(s - 1.0) < 1e-12) s = 1.0;
    if (std::abs(s + 1.0) < 1e-12) s = -1.0;
}

struct LinearMap {
    // Row-major 2x2.
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    void apply(double x, double y, double& ox, double& oy) const {
        ox = a * x + b * y;
        oy = c * x + d * y;
    }
};

// Forward linear part: rotation(theta) * scale * mirror.
LinearMap forward_map(const GeomTransform& t) {
    double co, si;
    snapped_trig(t.rotation, co, si);
    const double mx = t.hflip ? -t.scale : t.scale;
    const double my = t.vflip ? -t.scale : t.scale;
    return {co * mx, -si * my, si * mx, co * my};
}

LinearMap inverse_map(const GeomTransform& t) {
    double co, si;
    snapped_trig(t.rotation, co, si);
    const double inv = 1.0 / t.scale;
    const double mx = t.hflip ? -inv : inv;
    const double my = t.vflip ? -inv : inv;
    // mirror^-1 * scale^-1 * rotation(-theta)
    return {co * mx, si * mx, -si * my, co * my};
}

// Seeded elastic displacement grid: uniform noise in [-1, 1] per component,
// Gaussian-blurred with sigma, scaled by alpha. Returned planar (dx, dy).
void elastic_grid(const GeomTransform& t, int w, int h, std::vector<double>& dx,
                  std::vector<double>& dy) {
    const size_t n = static_cast<size_t>(w) * h;
    dx.resize(n);
    dy.resize(n);
    util::Rng rng(t.elastic_seed);
    for (size_t i = 0; i < n; ++i) dx[i] = rng.uniform(-1.0, 1.0);
    for (size_t i = 0; i < n; ++i) dy[i] = rng.uniform(-1.0, 1.0);

    const double sigma = t.elastic->sigma_px;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double ksum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        ksum += kernel[i + radius];
    }
    for (double& k : kernel) k /= ksum;

    auto blur = [&](std::vector<double>& plane) {
        std::vector<double> tmp(n);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i)
                    acc += kernel[i + radius] *
                           plane[static_cast<size_t>(y) * w + std::clamp(x + i, 0, w - 1)];
                tmp[static_cast<size_t>(y) * w + x] = acc;
            }
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i)
                    acc += kernel[i + radius] *
                           tmp[static_cast<size_t>(std::clamp(y + i, 0, h - 1)) * w + x];
                plane[static_cast<size_t>(y) * w + x] = acc;
            }
    };
    blur(dx);
    blur(dy);
    const double alpha = t.elastic->alpha_px;
    for (size_t i = 0; i < n; ++i) {
        dx[i] *= alpha;
        dy[i] *= alpha;
    }
}

// Source coordinates for every output pixel: affine inverse about the center
// plus the elastic offset when enabled.
void source_grid(const GeomTransform& t, int w, int h, bool with_elastic, std::vector<double>& sx,
                 std::vector<double>& sy) {
    const LinearMap inv = inverse_map(t);
    const double cx = (w - 1) * 0.5;
    const double cy = (h - 1) * 0.5;
    sx.resize(static_cast<size_t>(w) * h);
    sy.resize(static_cast<size_t>(w) * h);

    std::vector<double> ex, ey;
    const bool elastic = with_elastic && t.elastic.has_value();
    if (elastic) elastic_grid(t, w, h, ex, ey);

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const size_t i = static_cast<size_t>(y) * w + x;
            double ox, oy;
            inv.apply(x - cx, y - cy, ox, oy);
            sx[i] = ox + cx;
            sy[i] = oy + cy;
            if (elastic) {
                sx[i] += ex[i];
                sy[i] += ey[i];
            }
        }
}

// Bilinear with zero fill outside the source raster.
double sample_zero(const Image& img, double x, double y, int c) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double wx = x - x0;
    const double wy = y - y0;
    auto px = [&](int xx, int yy) -> double {
        if (xx < 0 || xx >= img.width || yy < 0 || yy >= img.height) return 0.0;
        return img.at(xx, yy, c);
    };
    const double top = px(x0, y0) + wx * (px(x0 + 1, y0) - px(x0, y0));
    const double bot = px(x0, y0 + 1) + wx * (px(x0 + 1, y0 + 1) - px(x0, y0 + 1));
    return top + wy * (bot - top);
}

} // namespace

Image apply_to_image(const GeomTransform& t, const Image& img) {
    validate_transform(t);
    std::vector<double> sx, sy;
    source_grid(t, img.width, img.height, true, sx, sy);
    Image out(img.width, img.height, img.channels);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const size_t i = static_cast<size_t>(y) * img.width + x;
            for (int c = 0; c < img.channels; ++c)
                out.at(x, y, c) = static_cast<float>(sample_zero(img, sx[i], sy[i], c));
        }
    return out;
}

LabelMask apply_to_mask(const GeomTransform& t, const LabelMask& mask) {
    validate_transform(t);
    std::vector<double> sx, sy;
    source_grid(t, mask.width, mask.height, true, sx, sy);
    LabelMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            const size_t i = static_cast<size_t>(y) * mask.width + x;
            const int xx = static_cast<int>(std::lround(sx[i]));
            const int yy = static_cast<int>(std::lround(sy[i]));
            out.at(x, y) = (xx < 0 || xx >= mask.width || yy < 0 || yy >= mask.height)
                               ? 0
                               : mask.at(xx, yy);
        }
    return out;
}

FlowField apply_to_flow(const GeomTransform& t, const FlowField& f, bool elastic_on_flow) {
    validate_transform(t);
    std::vector<double> sx, sy;
    source_grid(t, f.width, f.height, elastic_on_flow, sx, sy);

    Image planes(f.width, f.height, 2);
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x) {
            planes.at(x, y, 0) = f.u[f.idx(x, y)];
            planes.at(x, y, 1) = f.v[f.idx(x, y)];
        }

    const LinearMap fwd = forward_map(t);
    FlowField out(f.width, f.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x) {
            const size_t i = static_cast<size_t>(y) * f.width + x;
            const double u = sample_zero(planes, sx[i], sy[i], 0);
            const double v = sample_zero(planes, sx[i], sy[i], 1);
            double ou, ov;
            fwd.apply(u, v, ou, ov);
            out.u[i] = static_cast<float>(ou);
            out.v[i] = static_cast<float>(ov);
        }
    return out;
}

AugmentedSample augment_sample(const GeomTransform& t, const Image& img, const LabelMask& mask,
                               const FlowField* flow, bool elastic_on_flow) {
    if (img.width != mask.width || img.height != mask.height)
        throw ValidationError("augment: image and mask dimensions differ");
    if (flow && (flow->width != img.width || flow->height != img.height))
        throw ValidationError("augment: flow dimensions differ from image");
    AugmentedSample s;
    s.image = apply_to_image(t, img);
    s.mask = apply_to_mask(t, mask);
    if (flow) {
        s.flow = apply_to_flow(t, *flow, elastic_on_flow);
        s.elastic_flow_approx = t.elastic.has_value() && elastic_on_flow;
    }
    s.transform = t;
    return s;
}

} // namespace flowseg
