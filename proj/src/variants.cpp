#include "flowseg/variants.hpp"

#include "flowseg/util.hpp"

namespace flowseg {

namespace {

VariantSpec flow_variant(int offset, EncodingKind kind) {
    VariantSpec v;
    const std::string tag = "t" + std::to_string(offset);
    v.name = tag + "_" + encoding_name(kind);
    std::string disp = encoding_name(kind);
    if (kind == EncodingKind::RGBof)
        disp = "RGBof";
    else if (kind == EncodingKind::XY)
        disp = "XY";
    else
        disp = "PC";
    v.display = tag + " " + disp;
    FlowPairing p;
    p.offset = offset;
    v.pairing = p;
    v.encoding = kind;
    return v;
}

std::vector<VariantSpec> build_matrix() {
    std::vector<VariantSpec> out;
    VariantSpec rgb;
    rgb.name = "rgb";
    rgb.display = "RGB";
    out.push_back(rgb);
    for (EncodingKind kind : {EncodingKind::RGBof, EncodingKind::XY, EncodingKind::PC})
        for (int offset : {1, 5})
            out.push_back(flow_variant(offset, kind));
    return out;
}

} // namespace

const std::vector<VariantSpec>& all_variants() {
    static const std::vector<VariantSpec> matrix = build_matrix();
    return matrix;
}

const VariantSpec& find_variant(const std::string& name) {
    const std::string key = util::lower(util::trim(name));
    for (const VariantSpec& v : all_variants())
        if (v.name == key) return v;
    throw ValidationError("unknown variant '" + name +
                          "' (expected rgb, t1_rgbof, t5_rgbof, t1_xy, t5_xy, t1_pc, t5_pc)");
}

std::vector<VariantSpec> parse_variant_list(const std::string& text) {
    const std::string t = util::lower(util::trim(text));
    if (t.empty() || t == "all") return all_variants();
    std::vector<VariantSpec> out;
    for (const std::string& part : util::split(t, ',')) {
        const VariantSpec& v = find_variant(part);
        for (const VariantSpec& seen : out)
            if (seen.name == v.name) throw ValidationError("variant '" + v.name + "' listed twice");
        out.push_back(v);
    }
    return out;
}

} // namespace flowseg
