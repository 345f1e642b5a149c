#include "flowseg/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "flowseg/flow_repr.hpp"
#include "flowseg/util.hpp"
#include "flowseg/variants.hpp"

namespace flowseg {

namespace {

const char* kClassTokens[3] = {"grasper", "lhook", "mean"};

std::string pct_cell(double fraction) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", fraction * 100.0);
    return buf;
}

double parse_pct(const std::string& text, const std::string& where) {
    try {
        size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing");
        return v / 100.0;
    } catch (const std::exception&) {
        throw ValidationError("metrics csv: bad number '" + text + "' in " + where);
    }
}

void append_class_row(std::string& out, const RunMetrics& rm, const ClassAggregate& a, int cls) {
    out += rm.variant;
    out += ',';
    out += std::to_string(rm.run);
    out += ',';
    out += kClassTokens[cls];
    if (a.defined) {
        out += ',' + pct_cell(a.dc) + ',' + pct_cell(a.dc_std) + ',' + pct_cell(a.recall) + ',' +
               pct_cell(a.precision);
    } else {
        out += ",,,,";
    }
    out += '\n';
}

} // namespace

void write_runs_csv(const std::string& path, const std::vector<RunMetrics>& rows) {
    std::string out = "variant,run,class,dc,dc_std,recall,precision\n";
    for (const RunMetrics& rm : rows) {
        append_class_row(out, rm, rm.record.grasper, 0);
        append_class_row(out, rm, rm.record.lhook, 1);
        append_class_row(out, rm, rm.record.mean, 2);
    }
    write_text_file(path, out);
}

std::vector<RunMetrics> read_runs_csv(const std::string& path) {
    const std::vector<uint8_t> bytes = util::read_file_bytes(path);
    std::string text(bytes.begin(), bytes.end());
    std::vector<RunMetrics> out;
    size_t lineno = 0;
    bool saw_header = false;
    for (std::string& line : util::split(text, '\n')) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = util::trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!saw_header) {
            if (t != "variant,run,class,dc,dc_std,recall,precision")
                throw ValidationError(path + ": unexpected metrics csv header '" + t + "'");
            saw_header = true;
            continue;
        }
        const std::string where = path + ":" + std::to_string(lineno);
        const std::vector<std::string> cols = util::split(t, ',');
        if (cols.size() != 7) throw ValidationError(where + ": expected 7 columns");

        const std::string variant = util::trim(cols[0]);
        int run = 0;
        try {
            run = std::stoi(cols[1]);
        } catch (const std::exception&) {
            throw ValidationError(where + ": bad run number '" + cols[1] + "'");
        }
        RunMetrics* rm = nullptr;
        for (RunMetrics& cand : out)
            if (cand.variant == variant && cand.run == run) {
                rm = &cand;
                break;
            }
        if (!rm) {
            out.push_back({variant, run, {}});
            rm = &out.back();
        }

        const std::string cls = util::lower(util::trim(cols[2]));
        ClassAggregate* slot = nullptr;
        if (cls == "grasper")
            slot = &rm->record.grasper;
        else if (cls == "lhook")
            slot = &rm->record.lhook;
        else if (cls == "mean")
            slot = &rm->record.mean;
        else
            throw ValidationError(where + ": unknown class '" + cols[2] + "'");
        if (slot->defined) throw ValidationError(where + ": duplicate class row");

        if (util::trim(cols[3]).empty()) continue; // class undefined for this run
        slot->defined = true;
        slot->dc = parse_pct(util::trim(cols[3]), where);
        slot->dc_std = parse_pct(util::trim(cols[4]), where);
        slot->recall = parse_pct(util::trim(cols[5]), where);
        slot->precision = parse_pct(util::trim(cols[6]), where);
    }
    if (!saw_header) throw ValidationError(path + ": empty metrics csv");
    return out;
}

namespace {

std::string display_label(const std::string& id) {
    for (const VariantSpec& v : all_variants())
        if (v.name == id) return v.display;
    return id;
}

} // namespace

std::vector<SummaryRow> summarize_runs(const std::vector<RunMetrics>& rows) {
    std::vector<SummaryRow> out;
    std::vector<std::string> order;
    for (const RunMetrics& rm : rows) {
        bool seen = false;
        for (const std::string& v : order) seen = seen || v == rm.variant;
        if (!seen) order.push_back(rm.variant);
    }
    for (const std::string& variant : order) {
        std::vector<MetricsRecord> runs;
        for (const RunMetrics& rm : rows)
            if (rm.variant == variant) runs.push_back(rm.record);
        out.push_back({variant, display_label(variant), average_runs(runs)});
    }
    return out;
}

std::vector<SummaryRow> summarize_groups(const std::vector<SummaryRow>& variants,
                                         const std::vector<GroupSpec>& groups) {
    std::vector<std::string> names;
    std::vector<MetricsRecord> records;
    for (const SummaryRow& row : variants) {
        names.push_back(row.id);
        records.push_back(row.record);
    }
    std::vector<SummaryRow> out;
    for (const GroupSpec& g : groups)
        out.push_back({g.name, g.name, group_means(names, records, g)});
    return out;
}

namespace {

std::string cell_2dp(const ClassAggregate& a, double ClassAggregate::* field) {
    if (!a.defined) return "-";
    return util::format_pct(a.*field);
}

void pad_to(std::string& line, size_t width) {
    while (line.size() < width) line += ' ';
}

std::string rpad(const std::string& s, size_t width) {
    std::string out = s;
    while (out.size() < width) out.insert(out.begin(), ' ');
    return out;
}

} // namespace

std::string render_text_table(const std::string& title, const std::string& id_header,
                              const std::vector<SummaryRow>& rows) {
    size_t idw = id_header.size();
    for (const SummaryRow& r : rows) idw = std::max(idw, r.label.size());

    const char* group_names[3] = {"Grasper", "L-hook", "Mean"};
    std::string out = title + "\n";
    out += "Cells are percentages, two decimals, rounded half-up.\n";

    std::string header = id_header;
    pad_to(header, idw);
    for (const char* g : group_names) {
        header += " | ";
        header += rpad(std::string(g) + " DC", 10);
        header += rpad("Recall", 8);
        header += rpad("Precision", 11);
    }
    out += header + "\n";
    out += std::string(header.size(), '-') + "\n";

    for (const SummaryRow& r : rows) {
        std::string line = r.label;
        pad_to(line, idw);
        const ClassAggregate* agg[3] = {&r.record.grasper, &r.record.lhook, &r.record.mean};
        for (const ClassAggregate* a : agg) {
            line += " | ";
            line += rpad(cell_2dp(*a, &ClassAggregate::dc), 10);
            line += rpad(cell_2dp(*a, &ClassAggregate::recall), 8);
            line += rpad(cell_2dp(*a, &ClassAggregate::precision), 11);
        }
        out += line + "\n";
    }
    return out;
}

std::string render_csv_table(const std::string& id_header, const std::vector<SummaryRow>& rows) {
    std::string out = id_header;
    for (const char* cls : kClassTokens)
        for (const char* metric : {"dc", "recall", "precision"})
            out += "," + std::string(cls) + "_" + metric;
    out += '\n';
    for (const SummaryRow& r : rows) {
        out += r.id;
        const ClassAggregate* agg[3] = {&r.record.grasper, &r.record.lhook, &r.record.mean};
        for (const ClassAggregate* a : agg) {
            out += ',' + cell_2dp(*a, &ClassAggregate::dc);
            out += ',' + cell_2dp(*a, &ClassAggregate::recall);
            out += ',' + cell_2dp(*a, &ClassAggregate::precision);
        }
        out += '\n';
    }
    return out;
}

std::string render_runs_text(const std::vector<RunMetrics>& rows) {
    std::string out = "Per-run test metrics";
    out += " (DC spread is the population standard deviation over included frames)\n";
    size_t idw = std::string("variant").size();
    for (const RunMetrics& r : rows) idw = std::max(idw, display_label(r.variant).size());

    std::string header = "variant";
    pad_to(header, idw);
    header += "  run";
    for (const char* g : {"Grasper", "L-hook", "Mean"}) {
        header += " | ";
        header += rpad(std::string(g) + " DC", 16);
        header += rpad("Recall", 8);
        header += rpad("Precision", 11);
    }
    out += header + "\n" + std::string(header.size(), '-') + "\n";

    for (const RunMetrics& r : rows) {
        std::string line = display_label(r.variant);
        pad_to(line, idw);
        line += rpad(std::to_string(r.run), 5);
        const ClassAggregate* agg[3] = {&r.record.grasper, &r.record.lhook, &r.record.mean};
        for (const ClassAggregate* a : agg) {
            line += " | ";
            if (a->defined) {
                line += rpad(util::format_pct(a->dc) + " +- " +
                                 util::format_fixed(a->dc_std * 100.0, 3),
                             16);
                line += rpad(util::format_pct(a->recall), 8);
                line += rpad(util::format_pct(a->precision), 11);
            } else {
                line += rpad("-", 16) + rpad("-", 8) + rpad("-", 11);
            }
        }
        out += line + "\n";
    }
    return out;
}

namespace {

FlowField panel_field(int kind, int side) {
    FlowField f;
    f.width = side;
    f.height = side;
    f.u.assign(static_cast<size_t>(side) * side, 0.0f);
    f.v.assign(static_cast<size_t>(side) * side, 0.0f);
    const double c = (side - 1) / 2.0;
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            const double dx = x - c, dy = y - c;
            double u = 0.0, v = 0.0;
            switch (kind) {
            case 0: u = dx / c; v = dy / c; break; // the wheel itself
            case 1: u = 3.0; break;                // rightward translation
            case 2: v = -3.0; break;               // upward translation
            case 3: u = 2.0; v = 2.0; break;       // diagonal translation
            case 4: u = -0.05 * dy; v = 0.05 * dx; break; // rotation
            case 5: u = 0.05 * dx; v = 0.05 * dy; break;  // expansion
            case 6: u = 0.06 * dy; break;                 // shear
            default: break;                               // zero field
            }
            const size_t i = f.idx(x, y);
            f.u[i] = static_cast<float>(u);
            f.v[i] = static_cast<float>(v);
        }
    return f;
}

} // namespace

Image flow_contact_sheet(int panel_px) {
    if (panel_px < 8) throw ValidationError("contact sheet panels must be at least 8px");
    const int cols = 4, rows = 2, gap = 2;
    Image sheet;
    sheet.width = cols * panel_px + (cols + 1) * gap;
    sheet.height = rows * panel_px + (rows + 1) * gap;
    sheet.channels = 3;
    sheet.data.assign(static_cast<size_t>(sheet.width) * sheet.height * 3, 1.0f);

    for (int k = 0; k < cols * rows; ++k) {
        const FlowField f = panel_field(k, panel_px);
        const FlowEncoding enc = flow_to_colorwheel(f, NormalizationPolicy::per_image_max());
        const int ox = gap + (k % cols) * (panel_px + gap);
        const int oy = gap + (k / cols) * (panel_px + gap);
        for (int y = 0; y < panel_px; ++y)
            for (int x = 0; x < panel_px; ++x)
                for (int ch = 0; ch < 3; ++ch)
                    sheet.at(ox + x, oy + y, ch) = enc.planes.at(x, y, ch);
    }
    return sheet;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::vector<uint8_t> bytes(content.begin(), content.end());
    util::write_file_bytes(path, bytes);
}

} // namespace flowseg
