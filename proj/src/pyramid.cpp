#include "flowseg/pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flowseg/resample.hpp"

namespace flowseg {

void validate_pyramid_config(const PyramidConfig& cfg) {
    if (cfg.levels < 1) throw ValidationError("pyramid levels must be >= 1");
    if (!(cfg.scale > 0.0) || !(cfg.scale < 1.0))
        throw ValidationError("pyramid scale must be in (0, 1)");
    if (cfg.warps_per_level < 1) throw ValidationError("warps per level must be >= 1");
}

Image gaussian_blur5(const Image& src) {
    if (src.width <= 0 || src.height <= 0) throw ValidationError("gaussian_blur5: empty input");
    static constexpr double k[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
    const int w = src.width, h = src.height, c = src.channels;

    Image tmp(w, h, c);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int ch = 0; ch < c; ++ch) {
                double acc = 0.0;
                for (int t = -2; t <= 2; ++t)
                    acc += k[t + 2] * src.at(std::clamp(x + t, 0, w - 1), y, ch);
                tmp.at(x, y, ch) = static_cast<float>(acc);
            }

    Image out(w, h, c);
#pragma omp parallel for schedule(static)
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

std::vector<Image> gaussian_pyramid(const Image& base, int levels, double scale) {
    PyramidConfig cfg;
    cfg.levels = levels;
    cfg.scale = scale;
    validate_pyramid_config(cfg);
    if (base.width < 8 || base.height < 8)
        throw ValidationError("pyramid base must be at least 8x8");

    std::vector<Image> pyr;
    pyr.reserve(levels);
    pyr.push_back(base);
    for (int l = 1; l < levels; ++l) {
        const Image& prev = pyr.back();
        const int nw = static_cast<int>(std::llround(prev.width * scale));
        const int nh = static_cast<int>(std::llround(prev.height * scale));
        if (nw < 8 || nh < 8)
            throw ValidationError("pyramid level " + std::to_string(l) + " would be " +
                                  std::to_string(nw) + "x" + std::to_string(nh) +
                                  ", below the 8x8 minimum");
        pyr.push_back(resize_bilinear(gaussian_blur5(prev), nw, nh));
    }
    return pyr;
}

} // namespace flowseg
