#include "flowseg/horn_schunck.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flowseg/flow_ops.hpp"
#include "flowseg/resample.hpp"

namespace flowseg {

void validate_hs_params(const HSParams& p) {
    if (!(p.alpha > 0.0) || !std::isfinite(p.alpha))
        throw ValidationError("alpha must be positive and finite");
    if (p.iterations < 1) throw ValidationError("iterations must be >= 1");
    if (!(p.epsilon >= 0.0)) throw ValidationError("epsilon must be >= 0");
}

namespace detail {

HsLinearization linearize(const Image& a, const Image& b, const std::vector<double>& u0,
                          const std::vector<double>& v0) {
    const int w = a.width, h = a.height;
    FlowField f0(w, h);
    for (size_t i = 0; i < f0.pixel_count(); ++i) {
        f0.u[i] = static_cast<float>(u0[i]);
        f0.v[i] = static_cast<float>(v0[i]);
    }
    const Image bw = warp_by_flow(b, f0);

    HsLinearization lin;
    lin.width = w;
    lin.height = h;
    lin.ix.resize(static_cast<size_t>(w) * h);
    lin.iy.resize(lin.ix.size());
    lin.c.resize(lin.ix.size());

    // Spatial derivatives of the frame average (centered, one-sided at the
    // borders); temporal derivative from the warped second frame. The data
    // residual for the total flow (u, v) is ix*u + iy*v + c with the initial
    // flow folded into c.
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t i = static_cast<size_t>(y) * w + x;
            auto avg = [&](int xx, int yy) {
                return 0.5 * (static_cast<double>(a.at(xx, yy, 0)) + bw.at(xx, yy, 0));
            };
            const int xm = std::max(x - 1, 0), xp = std::min(x + 1, w - 1);
            const int ym = std::max(y - 1, 0), yp = std::min(y + 1, h - 1);
            const double ix = (avg(xp, y) - avg(xm, y)) / (xp - xm == 0 ? 1.0 : xp - xm);
            const double iy = (avg(x, yp) - avg(x, ym)) / (yp - ym == 0 ? 1.0 : yp - ym);
            const double it = static_cast<double>(bw.at(x, y, 0)) - a.at(x, y, 0);
            lin.ix[i] = ix;
            lin.iy[i] = iy;
            lin.c[i] = it - ix * u0[i] - iy * v0[i];
        }
    }
    return lin;
}

void hs_sweep(const HsLinearization& lin, double alpha2, const std::vector<double>& u_in,
              const std::vector<double>& v_in, std::vector<double>& u_out,
              std::vector<double>& v_out) {
    const int w = lin.width, h = lin.height;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t i = static_cast<size_t>(y) * w + x;
            double su = 0.0, sv = 0.0, wsum = 0.0;
            if (x > 0) { su += u_in[i - 1]; sv += v_in[i - 1]; wsum += 1.0; }
            if (x + 1 < w) { su += u_in[i + 1]; sv += v_in[i + 1]; wsum += 1.0; }
            if (y > 0) { su += u_in[i - w]; sv += v_in[i - w]; wsum += 1.0; }
            if (y + 1 < h) { su += u_in[i + w]; sv += v_in[i + w]; wsum += 1.0; }
            // Edge weight is 1/4 per neighbor; W = wsum/4 is the truncated
            // total at borders.
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

double hs_energy(const HsLinearization& lin, double alpha2, const std::vector<double>& u,
                 const std::vector<double>& v) {
    const int w = lin.width, h = lin.height;
    std::vector<double> row_sum(h, 0.0);
#pragma omp parallel for schedule(static)
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
        row_sum[y] = acc;
    }
    double total = 0.0;
    for (int y = 0; y < h; ++y) total += row_sum[y];
    return total;
}

} // namespace detail

namespace {

// Mean per-pixel update magnitude, reduced with serial row partials so the
// value does not depend on the thread count.
double mean_update(const std::vector<double>& u_new, const std::vector<double>& v_new,
                   const std::vector<double>& u_old, const std::vector<double>& v_old, int w,
                   int h) {
    std::vector<double> row_sum(h, 0.0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        double acc = 0.0;
        for (int x = 0; x < w; ++x) {
            const size_t i = static_cast<size_t>(y) * w + x;
            const double du = u_new[i] - u_old[i];
            const double dv = v_new[i] - v_old[i];
            acc += std::sqrt(du * du + dv * dv);
        }
        row_sum[y] = acc;
    }
    double total = 0.0;
    for (int y = 0; y < h; ++y) total += row_sum[y];
    return total / (static_cast<double>(w) * h);
}

FlowField solve_linearized(const Image& a, const Image& b, const HSParams& params,
                           std::vector<double>& u, std::vector<double>& v,
                           HSSolveTrace* trace) {
    const int w = a.width, h = a.height;
    const auto lin = detail::linearize(a, b, u, v);
    const double alpha2 = params.alpha * params.alpha;

    if (trace) {
        trace->energy.clear();
        trace->energy.push_back(detail::hs_energy(lin, alpha2, u, v));
        trace->iterations_run = 0;
    }

    std::vector<double> u_next(u.size()), v_next(v.size());
    double update = 0.0;
    int done = 0;
    for (int k = 0; k < params.iterations; ++k) {
        detail::hs_sweep(lin, alpha2, u, v, u_next, v_next);
        update = mean_update(u_next, v_next, u, v, w, h);
        u.swap(u_next);
        v.swap(v_next);
        ++done;
        if (trace) {
            trace->energy.push_back(detail::hs_energy(lin, alpha2, u, v));
            trace->iterations_run = done;
        }
        if (update < params.epsilon) break;
    }
    if (trace) trace->final_update = update;

    FlowField out(w, h);
    for (size_t i = 0; i < out.pixel_count(); ++i) {
        out.u[i] = static_cast<float>(u[i]);
        out.v[i] = static_cast<float>(v[i]);
    }
    return out;
}

} // namespace

FlowField horn_schunck(const Image& a, const Image& b, const HSParams& params,
                       const FlowField* init, HSSolveTrace* trace) {
    validate_hs_params(params);
    if (a.width != b.width || a.height != b.height)
        throw ValidationError("horn_schunck: frame dimensions differ");
    // The data term is balanced against alpha^2 on the conventional 8-bit
    // intensity scale; raw [0, 1] samples would starve it.
    Image la = luminance(a);
    Image lb = luminance(b);
    for (float& s : la.data) s *= 255.0f;
    for (float& s : lb.data) s *= 255.0f;

    const size_t n = la.pixel_count();
    std::vector<double> u(n, 0.0), v(n, 0.0);
    if (init) {
        if (init->width != a.width || init->height != a.height)
            throw ValidationError("horn_schunck: init flow dimensions differ from frames");
        validate_flow(*init, "init flow");
        for (size_t i = 0; i < n; ++i) {
            u[i] = init->u[i];
            v[i] = init->v[i];
        }
    }
    return solve_linearized(la, lb, params, u, v, trace);
}

FlowField estimate_flow(const Image& a, const Image& b, const PyramidConfig& pyr,
                        const HSParams& params, EstimateTrace* trace) {
    validate_pyramid_config(pyr);
    validate_hs_params(params);
    if (a.width != b.width || a.height != b.height)
        throw ValidationError("estimate_flow: frame dimensions differ");

    const auto pa = gaussian_pyramid(luminance(a), pyr.levels, pyr.scale);
    const auto pb = gaussian_pyramid(luminance(b), pyr.levels, pyr.scale);

    FlowField flow(pa.back().width, pa.back().height);
    for (int level = pyr.levels - 1; level >= 0; --level) {
        const Image& la = pa[level];
        const Image& lb = pb[level];
        if (flow.width != la.width || flow.height != la.height)
            flow = rescale_flow(flow, la.width, la.height);
        for (int step = 0; step < pyr.warps_per_level; ++step) {
            HSSolveTrace* solve_trace = nullptr;
            if (trace) solve_trace = &trace->solves.emplace_back();
            flow = horn_schunck(la, lb, params, &flow, solve_trace);
        }
    }
    return flow;
}

} // namespace flowseg
