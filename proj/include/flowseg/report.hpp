#pragma once

#include <string>
#include <vector>

#include "flowseg/metrics.hpp"

namespace flowseg {

// One trained model's test-set metrics, as stored in the per-run CSVs.
struct RunMetrics {
    std::string variant; // variant id, e.g. "t1_rgbof"
    int run = 0;         // repeat number, 1-based
    MetricsRecord record;
};

// CSV schema: variant,run,class,dc,dc_std,recall,precision with one row per
// class (grasper, lhook, mean) and values as percentages. The same schema is
// used for the published-table fixtures, which carry the printed figures.
void write_runs_csv(const std::string& path, const std::vector<RunMetrics>& rows);
std::vector<RunMetrics> read_runs_csv(const std::string& path);

// A summary row: a variant's run average, or a group mean.
struct SummaryRow {
    std::string id;    // variant id or group name
    std::string label; // display label used in rendered tables
    MetricsRecord record;
};

// Groups per-run rows by variant (order of first appearance) and averages the
// repeats element-wise.
std::vector<SummaryRow> summarize_runs(const std::vector<RunMetrics>& rows);

// Element-wise means over member variants for each group.
std::vector<SummaryRow> summarize_groups(const std::vector<SummaryRow>& variants,
                                         const std::vector<GroupSpec>& groups);

// Aligned plain-text table, one row per summary, columns DC/Recall/Precision
// per class then the class mean. Percentages, two decimals, half-up.
std::string render_text_table(const std::string& title, const std::string& id_header,
                              const std::vector<SummaryRow>& rows);

// Same cells as CSV. Header: id column then <class>_{dc,recall,precision}.
std::string render_csv_table(const std::string& id_header, const std::vector<SummaryRow>& rows);

// Per-run table with the Dice spread column ("dc +- std", population std over
// included frames).
std::string render_runs_text(const std::vector<RunMetrics>& rows);

// Contact sheet of canonical fields (translations, rotation, expansion,
// shear, zero) rendered through the color wheel, plus the wheel itself.
Image flow_contact_sheet(int panel_px = 96);

void write_text_file(const std::string& path, const std::string& content);

} // namespace flowseg
