#include "flowseg/flow_repr.hpp"

#include <algorithm>
#include <cmath>

#include "flowseg/parallel.hpp"

namespace flowseg {

const char* encoding_name(EncodingKind k) {
    switch (k) {
    case EncodingKind::RGBof: return "rgbof";
    case EncodingKind::XY: return "xy";
    case EncodingKind::PC: return "pc";
    }
    return "?";
}

EncodingKind parse_encoding(const std::string& name) {
    std::string n = util::lower(util::trim(name));
    if (n == "rgbof") return EncodingKind::RGBof;
    if (n == "xy") return EncodingKind::XY;
    if (n == "pc") return EncodingKind::PC;
    throw ValidationError("unknown flow encoding '" + name + "' (expected rgbof, xy, or pc)");
}

int encoding_channels(EncodingKind k) { return k == EncodingKind::RGBof ? 3 : 2; }

NormalizationPolicy NormalizationPolicy::fixed_cap(double max_px) {
    NormalizationPolicy n;
    n.mode = Mode::FixedCap;
    n.max_px = max_px;
    validate_policy(n);
    return n;
}

void validate_policy(const NormalizationPolicy& n) {
    if (n.mode == NormalizationPolicy::Mode::FixedCap &&
        !(std::isfinite(n.max_px) && n.max_px > 0.0))
        throw ValidationError("fixed-cap normalization needs max_px > 0");
}

FlowEncoding flow_to_xy(const FlowField& f) {
    validate_flow(f);
    FlowEncoding e;
    e.kind = EncodingKind::XY;
    e.planes = Image(f.width, f.height, 2);
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x) {
            e.planes.at(x, y, 0) = f.u[f.idx(x, y)];
            e.planes.at(x, y, 1) = f.v[f.idx(x, y)];
        }
    return e;
}

FlowField xy_to_flow(const FlowEncoding& e) {
    if (e.kind != EncodingKind::XY || e.planes.channels != 2)
        throw ValidationError("xy_to_flow expects a 2-plane XY encoding");
    FlowField f(e.planes.width, e.planes.height);
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x) {
            f.u[f.idx(x, y)] = e.planes.at(x, y, 0);
            f.v[f.idx(x, y)] = e.planes.at(x, y, 1);
        }
    return f;
}

namespace {

// atan2 in [0, 2*pi), y down; 0 for the zero vector.
double flow_angle(double u, double v) {
    if (u == 0.0 && v == 0.0) return 0.0;
    double a = std::atan2(v, u);
    if (a < 0.0) a += 2.0 * M_PI;
    if (a >= 2.0 * M_PI) a = 0.0;
    return a;
}

} // namespace

FlowEncoding flow_to_polar(const FlowField& f) {
    validate_flow(f);
    FlowEncoding e;
    e.kind = EncodingKind::PC;
    e.planes = Image(f.width, f.height, 2);
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x) {
            const double u = f.u[f.idx(x, y)];
            const double v = f.v[f.idx(x, y)];
            e.planes.at(x, y, 0) = static_cast<float>(std::sqrt(u * u + v * v));
            e.planes.at(x, y, 1) = static_cast<float>(flow_angle(u, v));
        }
    return e;
}

FlowField polar_to_flow(const FlowEncoding& e) {
    if (e.kind != EncodingKind::PC || e.planes.channels != 2)
        throw ValidationError("polar_to_flow expects a 2-plane PC encoding");
    FlowField f(e.planes.width, e.planes.height);
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x) {
            const double mag = e.planes.at(x, y, 0);
            const double ang = e.planes.at(x, y, 1);
            f.u[f.idx(x, y)] = static_cast<float>(mag * std::cos(ang));
            f.v[f.idx(x, y)] = static_cast<float>(mag * std::sin(ang));
        }
    return f;
}

namespace {

void hsv_to_rgb(double h, double s, double v, float& r, float& g, float& b) {
    const double h6 = h * 6.0;
    const int i = std::clamp(static_cast<int>(std::floor(h6)), 0, 5);
    const double f = h6 - i;
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - f * s);
    const double t = v * (1.0 - (1.0 - f) * s);
    double rr, gg, bb;
    switch (i) {
    case 0: rr = v; gg = t; bb = p; break;
    case 1: rr = q; gg = v; bb = p; break;
    case 2: rr = p; gg = v; bb = t; break;
    case 3: rr = p; gg = q; bb = v; break;
    case 4: rr = t; gg = p; bb = v; break;
    default: rr = v; gg = p; bb = q; break;
    }
    r = static_cast<float>(rr);
    g = static_cast<float>(gg);
    b = static_cast<float>(bb);
}

} // namespace

FlowEncoding flow_to_colorwheel(const FlowField& f, const NormalizationPolicy& n) {
    validate_flow(f);
    validate_policy(n);

    double cap;
    if (n.mode == NormalizationPolicy::Mode::FixedCap) {
        cap = n.max_px;
    } else {
        double max_mag = 0.0;
        for (size_t i = 0; i < f.pixel_count(); ++i) {
            const double u = f.u[i], v = f.v[i];
            max_mag = std::max(max_mag, std::sqrt(u * u + v * v));
        }
        cap = std::max(max_mag, 1e-6);
    }

    FlowEncoding e;
    e.kind = EncodingKind::RGBof;
    e.norm = n;
    e.planes = Image(f.width, f.height, 3);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x) {
            const size_t i = f.idx(x, y);
            const double u = f.u[i], v = f.v[i];
            const double mag = std::sqrt(u * u + v * v);
            const double hue = flow_angle(u, v) / (2.0 * M_PI);
            const double sat = std::min(mag / cap, 1.0);
            hsv_to_rgb(hue, sat, 1.0, e.planes.at(x, y, 0), e.planes.at(x, y, 1),
                       e.planes.at(x, y, 2));
        }
    return e;
}

FlowEncoding encode_flow(const FlowField& f, EncodingKind k, const NormalizationPolicy& n) {
    switch (k) {
    case EncodingKind::RGBof: return flow_to_colorwheel(f, n);
    case EncodingKind::XY: return flow_to_xy(f);
    case EncodingKind::PC: return flow_to_polar(f);
    }
    throw ValidationError("unknown encoding kind");
}

} // namespace flowseg
