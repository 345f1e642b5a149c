#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "flowseg/horn_schunck.hpp"
#include "flowseg/net.hpp"
#include "flowseg/pyramid.hpp"
#include "flowseg/raster.hpp"
#include "flowseg/reference.hpp"
#include "flowseg/resample.hpp"
#include "flowseg/util.hpp"

using namespace flowseg;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    double best = 1e30;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms, double max_diff) {
    std::printf("%-16s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx   max|diff| %.3g\n",
                name, serial_ms, parallel_ms, serial_ms / parallel_ms, max_diff);
}

Image random_image(util::Rng& rng, int w, int h, int c) {
    Image img(w, h, c);
    for (float& v : img.data) v = static_cast<float>(rng.uniform());
    return img;
}

FlowField random_flow(util::Rng& rng, int w, int h, double mag) {
    FlowField f(w, h);
    for (float& v : f.u) v = static_cast<float>(rng.uniform(-mag, mag));
    for (float& v : f.v) v = static_cast<float>(rng.uniform(-mag, mag));
    return f;
}

float max_abs_diff(const std::vector<float>& a, const std::vector<float>& b) {
    float m = 0.0f;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::string(argv[1]) == "--quick";
    const int side = quick ? 192 : 512;
    const int reps = quick ? 2 : 5;
    util::Rng rng(20240601);

    std::printf("kernel benchmark, %dx%d inputs, best of %d runs\n", side, side, reps);

    {
        const Image src = random_image(rng, side, side, 3);
        Image out_s, out_p;
        const double s = time_ms([&] { out_s = reference::resize_bilinear(src, side / 2 * 3, side); },
                                 reps);
        const double p = time_ms([&] { out_p = resize_bilinear(src, side / 2 * 3, side); }, reps);
        report("resize_bilinear", s, p, max_abs_diff(out_s.data, out_p.data));
    }
    {
        const Image src = random_image(rng, side, side, 3);
        Image out_s, out_p;
        const double s = time_ms([&] { out_s = reference::luminance(src); }, reps);
        const double p = time_ms([&] { out_p = luminance(src); }, reps);
        report("luminance", s, p, max_abs_diff(out_s.data, out_p.data));
    }
    {
        const Image src = random_image(rng, side, side, 1);
        Image out_s, out_p;
        const double s = time_ms([&] { out_s = reference::gaussian_blur5(src); }, reps);
        const double p = time_ms([&] { out_p = gaussian_blur5(src); }, reps);
        report("gaussian_blur5", s, p, max_abs_diff(out_s.data, out_p.data));
    }
    {
        const Image src = random_image(rng, side, side, 1);
        const FlowField f = random_flow(rng, side, side, 3.0);
        Image out_s, out_p;
        const double s = time_ms([&] { out_s = reference::warp_by_flow(src, f); }, reps);
        const double p = time_ms([&] { out_p = warp_by_flow(src, f); }, reps);
        report("warp_by_flow", s, p, max_abs_diff(out_s.data, out_p.data));
    }
    {
        const Image a = random_image(rng, side, side, 1);
        const Image b = random_image(rng, side, side, 1);
        const size_t n = a.pixel_count();
        std::vector<double> u0(n, 0.0), v0(n, 0.0);
        const detail::HsLinearization lin = detail::linearize(a, b, u0, v0);
        std::vector<double> us(n), vs(n), up(n), vp(n);
        const double alpha2 = 15.0 * 15.0;
        const double s =
            time_ms([&] { reference::hs_sweep(lin, alpha2, u0, v0, us, vs); }, reps);
        const double p = time_ms([&] { detail::hs_sweep(lin, alpha2, u0, v0, up, vp); }, reps);
        report("hs_sweep", s, p,
               std::max(max_abs_diff(us, up), max_abs_diff(vs, vp)));

        double es = 0.0, ep = 0.0;
        const double s2 = time_ms([&] { es = reference::hs_energy(lin, alpha2, us, vs); }, reps);
        const double p2 = time_ms([&] { ep = detail::hs_energy(lin, alpha2, us, vs); }, reps);
        report("hs_energy", s2, p2, std::abs(es - ep));
    }
    {
        const int c = 16, hw = quick ? 64 : 128;
        util::Rng wrng(7);
        std::vector<float> in(static_cast<size_t>(c) * hw * hw);
        std::vector<float> weights(static_cast<size_t>(c) * c * 9);
        std::vector<float> bias(c);
        for (float& v : in) v = static_cast<float>(wrng.uniform(-1.0, 1.0));
        for (float& v : weights) v = static_cast<float>(wrng.uniform(-0.2, 0.2));
        for (float& v : bias) v = static_cast<float>(wrng.uniform(-0.1, 0.1));
        std::vector<float> out_s, out_p;
        const double s = time_ms(
            [&] { reference::conv3x3_forward(in, c, hw, hw, weights, bias, c, out_s); }, reps);
        const double p = time_ms(
            [&] { detail::conv3x3_forward(in, c, hw, hw, weights, bias, c, out_p); }, reps);
        report("conv3x3", s, p, max_abs_diff(out_s, out_p));
    }
    return 0;
}
