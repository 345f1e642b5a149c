#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flowseg/flow_ops.hpp"
#include "flowseg/flow_repr.hpp"

namespace flowseg {

// One input configuration of the experiment matrix: plain RGB, or RGB plus an
// encoded flow field at temporal offset 1 or 5.
struct VariantSpec {
    std::string name;    // stable id used in paths and CSVs, e.g. "t1_rgbof"
    std::string display; // table label, e.g. "t1 RGBof"
    std::optional<FlowPairing> pairing;
    std::optional<EncodingKind> encoding;

    bool uses_flow() const { return pairing.has_value(); }

    // RGB contributes 3 channels; XY and PC add 2, RGBof adds 3.
    int channels() const {
        if (!encoding) return 3;
        return 3 + encoding_channels(*encoding);
    }
};

// The full seven-variant matrix in table order: RGB first, then t1/t5 per
// encoding.
const std::vector<VariantSpec>& all_variants();

const VariantSpec& find_variant(const std::string& name);

// Comma-separated variant names; "all" (or empty) selects the whole matrix.
std::vector<VariantSpec> parse_variant_list(const std::string& text);

} // namespace flowseg
