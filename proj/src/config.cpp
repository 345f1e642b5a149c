#include "flowseg/config.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "flowseg/util.hpp"
#include "flowseg/variants.hpp"

namespace flowseg {

namespace {

constexpr double kDegToRad = 0.017453292519943295;

struct KeyContext {
    std::string origin;
    size_t lineno = 0;
    std::string section;
    std::string key;

    std::string where() const {
        return origin + ":" + std::to_string(lineno) + ": [" + section + "] " + key;
    }
};

[[noreturn]] void bad_value(const KeyContext& ctx, const std::string& value,
                            const std::string& expected) {
    throw ValidationError(ctx.where() + " = '" + value + "': expected " + expected);
}

int parse_int(const KeyContext& ctx, const std::string& v) {
    try {
        size_t used = 0;
        const int out = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        bad_value(ctx, v, "an integer");
    }
}

uint64_t parse_u64(const KeyContext& ctx, const std::string& v) {
    try {
        size_t used = 0;
        const unsigned long long out = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        bad_value(ctx, v, "an unsigned integer");
    }
}

double parse_double(const KeyContext& ctx, const std::string& v) {
    try {
        size_t used = 0;
        const double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        bad_value(ctx, v, "a number");
    }
}

bool parse_bool(const KeyContext& ctx, const std::string& v) {
    const std::string t = util::lower(v);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    bad_value(ctx, v, "a boolean");
}

std::vector<int> parse_int_list(const KeyContext& ctx, const std::string& v) {
    std::vector<int> out;
    for (const std::string& part : util::split(v, ',')) {
        const std::string t = util::trim(part);
        if (t.empty()) bad_value(ctx, v, "a comma-separated integer list");
        out.push_back(parse_int(ctx, t));
    }
    return out;
}

void apply_key(ExperimentConfig& cfg, const KeyContext& ctx, const std::string& value) {
    const std::string& s = ctx.section;
    const std::string& k = ctx.key;

    if (s == "dataset") {
        if (k == "root") cfg.dataset.root = value;
        else if (k == "manifest") cfg.dataset.manifest = value;
        else if (k == "class_map") cfg.dataset.class_map = value;
        else if (k == "image_template") cfg.dataset.names.image = value;
        else if (k == "mask_template") cfg.dataset.names.mask = value;
        else throw ValidationError(ctx.where() + ": unknown key");
    } else if (s == "split") {
        if (k == "preset") {
            const std::string t = util::lower(value);
            if (t == "surgical") cfg.split.surgical = true;
            else if (t == "explicit") cfg.split.surgical = false;
            else bad_value(ctx, value, "'surgical' or 'explicit'");
        } else if (k == "train") cfg.split.train = parse_int_list(ctx, value);
        else if (k == "val") cfg.split.val = parse_int_list(ctx, value);
        else if (k == "test") cfg.split.test = parse_int_list(ctx, value);
        else throw ValidationError(ctx.where() + ": unknown key");
    } else if (s == "synth") {
        if (k == "cases") cfg.synth.cases = parse_int(ctx, value);
        else if (k == "clips_per_case") cfg.synth.clips_per_case = parse_int(ctx, value);
        else if (k == "frames_per_clip") cfg.synth.frames_per_clip = parse_int(ctx, value);
        else if (k == "width") cfg.synth.width = parse_int(ctx, value);
        else if (k == "height") cfg.synth.height = parse_int(ctx, value);
        else if (k == "slow_speed") cfg.synth.slow_speed = parse_double(ctx, value);
        else if (k == "fast_speed") cfg.synth.fast_speed = parse_double(ctx, value);
        else throw ValidationError(ctx.where() + ": unknown key");
    } else if (s == "flow") {
        if (k == "alpha") cfg.flow.hs.alpha = parse_double(ctx, value);
        else if (k == "iterations") cfg.flow.hs.iterations = parse_int(ctx, value);
        else if (k == "epsilon") cfg.flow.hs.epsilon = parse_double(ctx, value);
        else if (k == "levels") cfg.flow.pyr.levels = parse_int(ctx, value);
        else if (k == "scale") cfg.flow.pyr.scale = parse_double(ctx, value);
        else if (k == "warps_per_level") cfg.flow.pyr.warps_per_level = parse_int(ctx, value);
        else if (k == "offsets") cfg.flow.offsets = parse_int_list(ctx, value);
        else if (k == "boundary") {
            const std::string t = util::lower(value);
            if (t == "zero") cfg.flow.boundary = BoundaryPolicy::ZeroFlow;
            else if (t == "clamp") cfg.flow.boundary = BoundaryPolicy::ClampToFirst;
            else bad_value(ctx, value, "'zero' or 'clamp'");
        } else if (k == "tile_size") cfg.flow.tile_size = parse_int(ctx, value);
        else if (k == "blend") cfg.flow.blend = parse_blend(value);
        else throw ValidationError(ctx.where() + ": unknown key");
    } else if (s == "repr") {
        if (k == "encodings") {
            cfg.repr.encodings.clear();
            for (const std::string& part : util::split(value, ','))
                cfg.repr.encodings.push_back(parse_encoding(util::trim(part)));
        } else if (k == "normalization") {
            const std::string t = util::lower(util::trim(value));
            if (t == "per_image_max") {
                cfg.repr.norm = NormalizationPolicy::per_image_max();
            } else if (util::starts_with(t, "cap:")) {
                cfg.repr.norm = NormalizationPolicy::fixed_cap(
                    parse_double(ctx, util::trim(t.substr(4))));
            } else {
                bad_value(ctx, value, "'per_image_max' or 'cap:<pixels>'");
            }
        } else throw ValidationError(ctx.where() + ": unknown key");
    } else if (s == "augment") {
        if (k == "rot_prob") cfg.augment.rot_prob = parse_double(ctx, value);
        else if (k == "rot_max_deg") cfg.augment.rot_max_rad = parse_double(ctx, value) * kDegToRad;
        else if (k == "scale_prob") cfg.augment.scale_prob = parse_double(ctx, value);
        else if (k == "scale_lo") cfg.augment.scale_lo = parse_double(ctx, value);
        else if (k == "scale_hi") cfg.augment.scale_hi = parse_double(ctx, value);
        else if (k == "mirror_prob") cfg.augment.mirror_prob = parse_double(ctx, value);
        else if (k == "elastic_prob") cfg.augment.elastic_prob = parse_double(ctx, value);
        else if (k == "elastic_alpha") cfg.augment.elastic.alpha_px = parse_double(ctx, value);
        else if (k == "elastic_sigma") cfg.augment.elastic.sigma_px = parse_double(ctx, value);
        else if (k == "elastic_on_flow") cfg.augment.elastic_on_flow = parse_bool(ctx, value);
        else throw ValidationError(ctx.where() + ": unknown key");
    } else if (s == "net") {
        if (k == "depth") cfg.net.depth = parse_int(ctx, value);
        else if (k == "base_width") cfg.net.base_width = parse_int(ctx, value);
        else throw ValidationError(ctx.where() + ": unknown key");
    } else if (s == "train") {
        if (k == "epochs") cfg.train.epochs = parse_int(ctx, value);
        else if (k == "batch_size") cfg.train.batch_size = parse_int(ctx, value);
        else if (k == "learning_rate") cfg.train.learning_rate = parse_double(ctx, value);
        else if (k == "momentum") cfg.train.momentum = parse_double(ctx, value);
        else if (k == "dice_weight") cfg.train.dice_weight = parse_double(ctx, value);
        else if (k == "ce_weight") cfg.train.ce_weight = parse_double(ctx, value);
        else if (k == "repeats") cfg.train.repeats = parse_int(ctx, value);
        else if (k == "crop") cfg.train.crop = parse_int(ctx, value);
        else throw ValidationError(ctx.where() + ": unknown key");
    } else if (s == "run") {
        if (k == "seed") cfg.run.seed = parse_u64(ctx, value);
        else if (k == "workers") cfg.run.workers = parse_int(ctx, value);
        else if (k == "variants") cfg.run.variants = value;
        else if (k == "out") cfg.run.out = value;
        else throw ValidationError(ctx.where() + ": unknown key");
    } else {
        throw ValidationError(ctx.origin + ":" + std::to_string(ctx.lineno) +
                              ": unknown section [" + s + "]");
    }
}

} // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    std::string section;
    size_t lineno = 0;
    for (std::string line : util::split(text, '\n')) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = util::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ValidationError(origin + ":" + std::to_string(lineno) +
                                      ": unterminated section header");
            section = util::lower(util::trim(t.substr(1, t.size() - 2)));
            if (section.empty())
                throw ValidationError(origin + ":" + std::to_string(lineno) + ": empty section");
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError(origin + ":" + std::to_string(lineno) +
                                  ": expected key = value");
        if (section.empty())
            throw ValidationError(origin + ":" + std::to_string(lineno) +
                                  ": key before any [section]");
        KeyContext ctx{origin, lineno, section, util::lower(util::trim(t.substr(0, eq)))};
        if (ctx.key.empty())
            throw ValidationError(origin + ":" + std::to_string(lineno) + ": empty key");
        apply_key(cfg, ctx, util::trim(t.substr(eq + 1)));
    }
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    const std::vector<uint8_t> bytes = util::read_file_bytes(path);
    return parse_config(std::string(bytes.begin(), bytes.end()), path);
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.dataset.root.empty()) throw ValidationError("dataset root must not be empty");
    ClassMap::parse(cfg.dataset.class_map); // throws on malformed specs

    if (!cfg.split.surgical) {
        if (cfg.split.train.empty() || cfg.split.val.empty() || cfg.split.test.empty())
            throw ValidationError(
                "explicit splits need non-empty train, val, and test case lists");
        std::set<int> seen;
        for (const std::vector<int>* part : {&cfg.split.train, &cfg.split.val, &cfg.split.test})
            for (int c : *part)
                if (!seen.insert(c).second)
                    throw ValidationError("case " + std::to_string(c) +
                                          " appears in more than one split");
    }

    validate_synth_params(cfg.synth);
    validate_hs_params(cfg.flow.hs);
    validate_pyramid_config(cfg.flow.pyr);
    if (cfg.flow.offsets.empty()) throw ValidationError("flow needs at least one offset");
    std::set<int> offs;
    for (int o : cfg.flow.offsets) {
        if (o < 1) throw ValidationError("flow offsets must be >= 1");
        if (!offs.insert(o).second) throw ValidationError("duplicate flow offset");
    }
    if (cfg.flow.tile_size < 8) throw ValidationError("tile size must be at least 8px");

    if (cfg.repr.encodings.empty()) throw ValidationError("repr needs at least one encoding");
    validate_policy(cfg.repr.norm);
    validate_ranges(cfg.augment);

    NetworkConfig nc;
    nc.depth = cfg.net.depth;
    nc.base_width = cfg.net.base_width;
    validate_network_config(nc);
    validate_train_config(cfg.train);

    if (cfg.run.workers < 1) throw ValidationError("workers must be at least 1");
    if (cfg.run.out.empty()) throw ValidationError("output directory must not be empty");
    parse_variant_list(cfg.run.variants); // throws on unknown names
}

CaseSplit resolve_split(const ExperimentConfig& cfg) {
    if (cfg.split.surgical) return CaseSplit::surgical_default();
    CaseSplit s;
    s.train = cfg.split.train;
    s.validation = cfg.split.val;
    s.test = cfg.split.test;
    return s;
}

namespace {

// Shortest decimal form that parses back to the same double, so a rendered
// config reproduces its values bit for bit.
std::string num(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out;
}

} // namespace

std::string render_config(const ExperimentConfig& cfg) {
    std::string o;
    o += "[dataset]\n";
    o += "root = " + cfg.dataset.root + "\n";
    o += "manifest = " + cfg.dataset.manifest + "\n";
    o += "class_map = " + cfg.dataset.class_map + "\n";
    o += "image_template = " + cfg.dataset.names.image + "\n";
    o += "mask_template = " + cfg.dataset.names.mask + "\n";

    o += "\n[split]\n";
    o += std::string("preset = ") + (cfg.split.surgical ? "surgical" : "explicit") + "\n";
    if (!cfg.split.surgical) {
        o += "train = " + join_ints(cfg.split.train) + "\n";
        o += "val = " + join_ints(cfg.split.val) + "\n";
        o += "test = " + join_ints(cfg.split.test) + "\n";
    }

    o += "\n[synth]\n";
    o += "cases = " + std::to_string(cfg.synth.cases) + "\n";
    o += "clips_per_case = " + std::to_string(cfg.synth.clips_per_case) + "\n";
    o += "frames_per_clip = " + std::to_string(cfg.synth.frames_per_clip) + "\n";
    o += "width = " + std::to_string(cfg.synth.width) + "\n";
    o += "height = " + std::to_string(cfg.synth.height) + "\n";
    o += "slow_speed = " + num(cfg.synth.slow_speed) + "\n";
    o += "fast_speed = " + num(cfg.synth.fast_speed) + "\n";

    o += "\n[flow]\n";
    o += "alpha = " + num(cfg.flow.hs.alpha) + "\n";
    o += "iterations = " + std::to_string(cfg.flow.hs.iterations) + "\n";
    o += "epsilon = " + num(cfg.flow.hs.epsilon) + "\n";
    o += "levels = " + std::to_string(cfg.flow.pyr.levels) + "\n";
    o += "scale = " + num(cfg.flow.pyr.scale) + "\n";
    o += "warps_per_level = " + std::to_string(cfg.flow.pyr.warps_per_level) + "\n";
    o += "offsets = " + join_ints(cfg.flow.offsets) + "\n";
    o += std::string("boundary = ") +
         (cfg.flow.boundary == BoundaryPolicy::ZeroFlow ? "zero" : "clamp") + "\n";
    o += "tile_size = " + std::to_string(cfg.flow.tile_size) + "\n";
    o += std::string("blend = ") + blend_name(cfg.flow.blend) + "\n";

    o += "\n[repr]\n";
    std::string encs;
    for (size_t i = 0; i < cfg.repr.encodings.size(); ++i) {
        if (i) encs += ",";
        encs += encoding_name(cfg.repr.encodings[i]);
    }
    o += "encodings = " + encs + "\n";
    if (cfg.repr.norm.mode == NormalizationPolicy::Mode::PerImageMax)
        o += "normalization = per_image_max\n";
    else
        o += "normalization = cap:" + num(cfg.repr.norm.max_px) + "\n";

    o += "\n[augment]\n";
    o += "rot_prob = " + num(cfg.augment.rot_prob) + "\n";
    o += "rot_max_deg = " + num(cfg.augment.rot_max_rad / kDegToRad) + "\n";
    o += "scale_prob = " + num(cfg.augment.scale_prob) + "\n";
    o += "scale_lo = " + num(cfg.augment.scale_lo) + "\n";
    o += "scale_hi = " + num(cfg.augment.scale_hi) + "\n";
    o += "mirror_prob = " + num(cfg.augment.mirror_prob) + "\n";
    o += "elastic_prob = " + num(cfg.augment.elastic_prob) + "\n";
    o += "elastic_alpha = " + num(cfg.augment.elastic.alpha_px) + "\n";
    o += "elastic_sigma = " + num(cfg.augment.elastic.sigma_px) + "\n";
    o += std::string("elastic_on_flow = ") + (cfg.augment.elastic_on_flow ? "true" : "false") +
         "\n";

    o += "\n[net]\n";
    o += "depth = " + std::to_string(cfg.net.depth) + "\n";
    o += "base_width = " + std::to_string(cfg.net.base_width) + "\n";

    o += "\n[train]\n";
    o += "epochs = " + std::to_string(cfg.train.epochs) + "\n";
    o += "batch_size = " + std::to_string(cfg.train.batch_size) + "\n";
    o += "learning_rate = " + num(cfg.train.learning_rate) + "\n";
    o += "momentum = " + num(cfg.train.momentum) + "\n";
    o += "dice_weight = " + num(cfg.train.dice_weight) + "\n";
    o += "ce_weight = " + num(cfg.train.ce_weight) + "\n";
    o += "repeats = " + std::to_string(cfg.train.repeats) + "\n";
    o += "crop = " + std::to_string(cfg.train.crop) + "\n";

    o += "\n[run]\n";
    char seedbuf[32];
    std::snprintf(seedbuf, sizeof(seedbuf), "%" PRIu64, cfg.run.seed);
    o += std::string("seed = ") + seedbuf + "\n";
    o += "workers = " + std::to_string(cfg.run.workers) + "\n";
    o += "variants = " + cfg.run.variants + "\n";
    o += "out = " + cfg.run.out + "\n";
    return o;
}

} // namespace flowseg
