#pragma once

#include <vector>

#include "flowseg/pyramid.hpp"
#include "flowseg/raster.hpp"

namespace flowseg {

struct HSParams {
    double alpha = 15.0;   // smoothness weight; the objective weights the
                           // smoothness term by alpha^2
    int iterations = 100;  // maximum sweeps per linearized solve
    double epsilon = 1e-4; // stop when the mean update magnitude drops below
};

void validate_hs_params(const HSParams& p);

// Per-solve trace: energy[0] is the objective before the first sweep, then one
// entry per completed sweep. The objective is the data term plus alpha^2 times
// the smoothness term, evaluated in double precision.
struct HSSolveTrace {
    std::vector<double> energy;
    int iterations_run = 0;
    double final_update = 0.0;
};

struct EstimateTrace {
    std::vector<HSSolveTrace> solves; // one per (level, warp step)
};

namespace detail {

// Linearized data term: residual at a pixel is ix*u + iy*v + c.
struct HsLinearization {
    int width = 0;
    int height = 0;
    std::vector<double> ix, iy, c;
};

// One block-Jacobi sweep. Each pixel's (u, v) is the exact minimizer of its
// local objective given the neighbors from the previous iterate, so the global
// objective is non-increasing per sweep. OpenMP over rows; per-pixel
// arithmetic is independent of the thread count.
void hs_sweep(const HsLinearization& lin, double alpha2, const std::vector<double>& u_in,
              const std::vector<double>& v_in, std::vector<double>& u_out,
              std::vector<double>& v_out);

// Objective value: sum of squared data residuals plus alpha^2 * (1/4) * sum of
// squared neighbor differences over right/down edges. Deterministic reduction
// (serial row partials).
double hs_energy(const HsLinearization& lin, double alpha2, const std::vector<double>& u,
                 const std::vector<double>& v);

// Builds the linearization of brightness constancy around flow (u0, v0):
// warps b by the flow, takes centered spatial derivatives of the average
// image, and folds the initial flow into the constant term.
HsLinearization linearize(const Image& a, const Image& b, const std::vector<double>& u0,
                          const std::vector<double>& v0);

} // namespace detail

// Single-level solve for the flow from a to b. The data term is linearized
// once around `init` (zero flow when null); sweeps then minimize the full
// objective in the total flow. Multi-channel inputs are reduced to luminance.
FlowField horn_schunck(const Image& a, const Image& b, const HSParams& params,
                       const FlowField* init = nullptr, HSSolveTrace* trace = nullptr);

// Coarse-to-fine driver: luminance, Gaussian pyramids, zero init at the
// coarsest level, then per level `warps_per_level` relinearized solves with
// the upscaled flow as the starting point.
FlowField estimate_flow(const Image& a, const Image& b, const PyramidConfig& pyr,
                        const HSParams& params, EstimateTrace* trace = nullptr);

} // namespace flowseg
