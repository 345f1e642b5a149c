#pragma once

#include <vector>

#include "flowseg/horn_schunck.hpp"
#include "flowseg/raster.hpp"

// Plain serial implementations of the hot kernels, written independently of
// the OpenMP versions. They are the ground truth for the parity tests and the
// baseline side of the benchmark; keep them simple rather than fast.
namespace flowseg::reference {

Image resize_bilinear(const Image& src, int out_w, int out_h);
Image luminance(const Image& src);
Image gaussian_blur5(const Image& src);
Image warp_by_flow(const Image& src, const FlowField& flow);

void hs_sweep(const detail::HsLinearization& lin, double alpha2, const std::vector<double>& u_in,
              const std::vector<double>& v_in, std::vector<double>& u_out,
              std::vector<double>& v_out);

double hs_energy(const detail::HsLinearization& lin, double alpha2, const std::vector<double>& u,
                 const std::vector<double>& v);

// 3x3 same-padding convolution over planar (c, h, w) float data.
void conv3x3_forward(const std::vector<float>& in, int in_c, int h, int w,
                     const std::vector<float>& weights, const std::vector<float>& bias, int out_c,
                     std::vector<float>& out);

} // namespace flowseg::reference
