#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "flowseg/dataset.hpp"
#include "flowseg/png_io.hpp"

namespace fs = std::filesystem;

namespace flowseg {

void validate_synth_params(const SynthParams& p) {
    if (p.cases < 1 || p.clips_per_case < 1)
        throw ValidationError("synthetic dataset needs at least one case and clip");
    if (p.frames_per_clip < 6)
        throw ValidationError("synthetic clips need >= 6 frames so t5 pairing works");
    if (p.width < 32 || p.height < 32)
        throw ValidationError("synthetic frames must be at least 32x32");
    if (!(p.slow_speed > 0.0) || !(p.fast_speed >= 3.0 * p.slow_speed))
        throw ValidationError("synthetic fast class must move at least 3x the slow class");
}

namespace {

struct Sinusoid {
    double fx, fy, phase, amp;
};

// Smooth drifting background texture; per-channel sinusoid mixtures sampled
// at coordinates shifted by the drift so the whole backdrop translates.
struct Background {
    double base[3];
    Sinusoid waves[3][2];
    double drift_x, drift_y;

    double sample(int ch, double x, double y, int t) const {
        const double sx = x - drift_x * t;
        const double sy = y - drift_y * t;
        double v = base[ch];
        for (const Sinusoid& w : waves[ch])
            v += w.amp * std::sin(2.0 * M_PI * (w.fx * sx + w.fy * sy) + w.phase);
        return v;
    }
};

// A textured moving shape: elliptical "slow tool" or bar-shaped "fast tool".
// The stripe texture rides along with the center so the shape's interior
// motion matches its trajectory.
struct Shape {
    bool is_bar = false;
    double cx0, cy0, vx, vy;
    double rx, ry;          // ellipse radii or bar half-extents
    double bar_cos = 1.0, bar_sin = 0.0;
    double base[3];
    double stripe_amp, stripe_freq, stripe_phase;
    double stripe_cos, stripe_sin;

    bool covers(double x, double y, int t) const {
        const double dx = x - (cx0 + vx * t);
        const double dy = y - (cy0 + vy * t);
        if (is_bar) {
            const double lx = dx * bar_cos + dy * bar_sin;
            const double ly = -dx * bar_sin + dy * bar_cos;
            return std::abs(lx) <= rx && std::abs(ly) <= ry;
        }
        const double ex = dx / rx;
        const double ey = dy / ry;
        return ex * ex + ey * ey <= 1.0;
    }

    double sample(int ch, double x, double y, int t) const {
        const double dx = x - (cx0 + vx * t);
        const double dy = y - (cy0 + vy * t);
        const double s = dx * stripe_cos + dy * stripe_sin;
        return base[ch] + stripe_amp * std::sin(2.0 * M_PI * stripe_freq * s + stripe_phase);
    }
};

// Picks a start point and direction whose whole trajectory stays inside the
// frame with the given margin. Deterministic: retries consume the same
// stream.
void plan_trajectory(util::Rng& rng, int w, int h, double margin, double speed, int frames, Shape& s) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        const double x0 = rng.uniform(margin, w - 1 - margin);
        const double y0 = rng.uniform(margin, h - 1 - margin);
        const double ang = rng.uniform(0.0, 2.0 * M_PI);
        const double vx = speed * std::cos(ang);
        const double vy = speed * std::sin(ang);
        const double x1 = x0 + vx * (frames - 1);
        const double y1 = y0 + vy * (frames - 1);
        if (x1 >= margin && x1 <= w - 1 - margin && y1 >= margin && y1 <= h - 1 - margin) {
            s.cx0 = x0;
            s.cy0 = y0;
            s.vx = vx;
            s.vy = vy;
            return;
        }
    }
    // Cramped canvas: park it in the middle and creep along x.
    s.cx0 = (w - 1) * 0.5;
    s.cy0 = (h - 1) * 0.5;
    s.vx = std::min(speed, (w - 1 - 2 * margin) / std::max(1, frames - 1));
    s.vy = 0.0;
}

Background make_background(util::Rng& rng) {
    Background b;
    const double bases[3] = {0.48, 0.34, 0.30}; // reddish surgical cavity tint
    for (int ch = 0; ch < 3; ++ch) {
        b.base[ch] = bases[ch] + rng.uniform(-0.05, 0.05);
        for (Sinusoid& w : b.waves[ch]) {
            w.fx = rng.uniform(-3.0, 3.0) / 96.0;
            w.fy = rng.uniform(-3.0, 3.0) / 96.0;
            w.phase = rng.uniform(0.0, 2.0 * M_PI);
            w.amp = rng.uniform(0.04, 0.09);
        }
    }
    const double drift_ang = rng.uniform(0.0, 2.0 * M_PI);
    const double drift_speed = rng.uniform(0.15, 0.3);
    b.drift_x = drift_speed * std::cos(drift_ang);
    b.drift_y = drift_speed * std::sin(drift_ang);
    return b;
}

Shape make_slow_tool(util::Rng& rng, const SynthParams& p) {
    Shape s;
    s.is_bar = false;
    s.rx = p.width * rng.uniform(0.13, 0.17);
    s.ry = p.height * rng.uniform(0.08, 0.11);
    const double grays[3] = {0.68, 0.72, 0.78}; // cold metallic
    for (int ch = 0; ch < 3; ++ch) s.base[ch] = grays[ch] + rng.uniform(-0.04, 0.04);
    s.stripe_amp = rng.uniform(0.10, 0.16);
    s.stripe_freq = 1.0 / rng.uniform(6.0, 9.0);
    s.stripe_phase = rng.uniform(0.0, 2.0 * M_PI);
    const double sa = rng.uniform(0.0, M_PI);
    s.stripe_cos = std::cos(sa);
    s.stripe_sin = std::sin(sa);
    return s;
}

Shape make_fast_tool(util::Rng& rng, const SynthParams& p) {
    Shape s;
    s.is_bar = true;
    s.rx = p.width * rng.uniform(0.14, 0.18);
    s.ry = p.height * rng.uniform(0.04, 0.06);
    const double bar_ang = rng.uniform(0.0, M_PI);
    s.bar_cos = std::cos(bar_ang);
    s.bar_sin = std::sin(bar_ang);
    const double tint[3] = {0.82, 0.74, 0.38}; // brassy hook
    for (int ch = 0; ch < 3; ++ch) s.base[ch] = tint[ch] + rng.uniform(-0.04, 0.04);
    s.stripe_amp = rng.uniform(0.10, 0.16);
    s.stripe_freq = 1.0 / rng.uniform(5.0, 8.0);
    s.stripe_phase = rng.uniform(0.0, 2.0 * M_PI);
    const double sa = rng.uniform(0.0, M_PI);
    s.stripe_cos = std::cos(sa);
    s.stripe_sin = std::sin(sa);
    return s;
}

} // namespace

DatasetManifest synth_dataset(uint64_t seed, const SynthParams& p, const std::string& root) {
    validate_synth_params(p);

    DatasetManifest manifest;
    manifest.root = root;

    char case_name[32], clip_name[48];
    for (int ci = 0; ci < p.cases; ++ci) {
        const int case_id = ci + 1;
        std::snprintf(case_name, sizeof case_name, "video%02d", case_id);
        CaseRecord cr;
        cr.case_id = case_id;

        for (int ki = 0; ki < p.clips_per_case; ++ki) {
            const int clip_id = (ki + 1) * 100;
            std::snprintf(clip_name, sizeof clip_name, "%s_%05d", case_name, clip_id);
            const std::string clip_dir = std::string(case_name) + "/" + clip_name;
            fs::create_directories(fs::path(root) / clip_dir);

            util::Rng rng(util::derive_seed(seed, "synth/" + std::to_string(case_id) + "/" +
                                          std::to_string(clip_id)));
            Background bg = make_background(rng);
            Shape slow = make_slow_tool(rng, p);
            Shape fast = make_fast_tool(rng, p);
            const double slow_margin = std::max(slow.rx, slow.ry) + 2.0;
            const double fast_margin = std::hypot(fast.rx, fast.ry) + 2.0;
            plan_trajectory(rng, p.width, p.height, slow_margin, p.slow_speed,
                            p.frames_per_clip, slow);
            plan_trajectory(rng, p.width, p.height, fast_margin, p.fast_speed,
                            p.frames_per_clip, fast);

            // The first clip of every case carries both tools; later clips may
            // drop one so presence flags vary.
            bool with_slow = true, with_fast = true;
            if (ki > 0) {
                with_slow = !rng.bernoulli(0.25);
                with_fast = !rng.bernoulli(0.25);
            }

            ClipRecord clip;
            clip.clip_id = clip_id;
            for (int t = 0; t < p.frames_per_clip; ++t) {
                Image img(p.width, p.height, 3);
                LabelMask mask(p.width, p.height);
                for (int y = 0; y < p.height; ++y)
                    for (int x = 0; x < p.width; ++x) {
                        uint8_t label = kBackground;
                        if (with_slow && slow.covers(x, y, t)) label = kGrasper;
                        if (with_fast && fast.covers(x, y, t)) label = kLhook;
                        mask.at(x, y) = label;
                        const Shape* top = label == kGrasper ? &slow
                                           : label == kLhook ? &fast
                                                             : nullptr;
                        for (int ch = 0; ch < 3; ++ch) {
                            const double v = top ? top->sample(ch, x, y, t)
                                                 : bg.sample(ch, x, y, t);
                            img.at(x, y, ch) =
                                static_cast<float>(std::clamp(v, 0.0, 1.0));
                        }
                    }

                FrameRecord fr;
                fr.index = clip_id + t;
                fr.image_path = clip_dir + "/" + expand_template("frame_{n}_endo.png", fr.index);
                fr.mask_path =
                    clip_dir + "/" + expand_template("frame_{n}_endo_watermask.png", fr.index);
                for (uint8_t label : mask.labels) {
                    if (label == kGrasper) fr.has_grasper = true;
                    if (label == kLhook) fr.has_lhook = true;
                }
                write_image_png(root + "/" + fr.image_path, img);
                write_mask_png(root + "/" + fr.mask_path, mask);
                clip.frames.push_back(std::move(fr));
            }
            cr.clips.push_back(std::move(clip));
        }
        manifest.cases.push_back(std::move(cr));
    }
    validate_manifest(manifest);
    return manifest;
}

} // namespace flowseg
