#include <doctest.h>

#include <filesystem>

#include "flowseg/report.hpp"
#include "flowseg/util.hpp"

using namespace flowseg;
namespace fs = std::filesystem;

namespace {

ClassAggregate agg(double dc, double dc_std, double recall, double precision) {
    ClassAggregate a;
    a.defined = true;
    a.dc = dc;
    a.dc_std = dc_std;
    a.recall = recall;
    a.precision = precision;
    return a;
}

RunMetrics run_row(const std::string& variant, int run, double g_dc, double l_dc) {
    RunMetrics rm;
    rm.variant = variant;
    rm.run = run;
    rm.record.grasper = agg(g_dc, 0.01, g_dc + 0.02, g_dc - 0.02);
    rm.record.lhook = agg(l_dc, 0.02, l_dc + 0.01, l_dc - 0.01);
    rm.record.recompute_mean();
    return rm;
}

fs::path temp_csv(const char* name) { return fs::temp_directory_path() / name; }

void check_close(const ClassAggregate& a, const ClassAggregate& b) {
    REQUIRE(a.defined == b.defined);
    if (!a.defined) return;
    CHECK(a.dc == doctest::Approx(b.dc).epsilon(1e-9));
    CHECK(a.dc_std == doctest::Approx(b.dc_std).epsilon(1e-9));
    CHECK(a.recall == doctest::Approx(b.recall).epsilon(1e-9));
    CHECK(a.precision == doctest::Approx(b.precision).epsilon(1e-9));
}

} // namespace

TEST_CASE("runs csv round-trips records including undefined classes") {
    std::vector<RunMetrics> rows;
    rows.push_back(run_row("rgb", 1, 0.7597, 0.591283));
    rows.push_back(run_row("t1_rgbof", 1, 0.77, 0.62));
    RunMetrics sparse;
    sparse.variant = "rgb";
    sparse.run = 2;
    sparse.record.grasper = agg(0.5, 0.0, 0.5, 0.5);
    sparse.record.recompute_mean();
    rows.push_back(sparse);

    const fs::path p = temp_csv("flowseg_runs_roundtrip.csv");
    write_runs_csv(p.string(), rows);
    const std::vector<RunMetrics> back = read_runs_csv(p.string());
    fs::remove(p);

    REQUIRE(back.size() == rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].variant == rows[i].variant);
        CHECK(back[i].run == rows[i].run);
        check_close(back[i].record.grasper, rows[i].record.grasper);
        check_close(back[i].record.lhook, rows[i].record.lhook);
        check_close(back[i].record.mean, rows[i].record.mean);
    }
    CHECK_FALSE(back[2].record.lhook.defined);
}

TEST_CASE("runs csv parser rejects malformed input") {
    const fs::path p = temp_csv("flowseg_runs_bad.csv");

    write_text_file(p.string(), "nope,run,class\n");
    CHECK_THROWS_WITH_AS(read_runs_csv(p.string()), doctest::Contains("header"), ValidationError);

    write_text_file(p.string(), "");
    CHECK_THROWS_WITH_AS(read_runs_csv(p.string()), doctest::Contains("empty"), ValidationError);

    const std::string header = "variant,run,class,dc,dc_std,recall,precision\n";
    write_text_file(p.string(), header + "rgb,1,grasper,50\n");
    CHECK_THROWS_WITH_AS(read_runs_csv(p.string()), doctest::Contains("7 columns"),
                         ValidationError);

    write_text_file(p.string(), header + "rgb,one,grasper,50,1,50,50\n");
    CHECK_THROWS_WITH_AS(read_runs_csv(p.string()), doctest::Contains("run"), ValidationError);

    write_text_file(p.string(), header + "rgb,1,thumb,50,1,50,50\n");
    CHECK_THROWS_WITH_AS(read_runs_csv(p.string()), doctest::Contains("thumb"), ValidationError);

    write_text_file(p.string(), header + "rgb,1,grasper,50,1,50,50\nrgb,1,grasper,60,1,60,60\n");
    CHECK_THROWS_WITH_AS(read_runs_csv(p.string()), doctest::Contains("duplicate"),
                         ValidationError);

    write_text_file(p.string(), header + "rgb,1,grasper,50,1,fifty,50\n");
    CHECK_THROWS_WITH_AS(read_runs_csv(p.string()), doctest::Contains("fifty"), ValidationError);
    fs::remove(p);

    CHECK_THROWS_AS(read_runs_csv((fs::temp_directory_path() / "no_such_runs.csv").string()),
                    MissingArtifactError);
}

TEST_CASE("runs csv parser skips comments and blank lines") {
    const fs::path p = temp_csv("flowseg_runs_comments.csv");
    write_text_file(p.string(), "# produced for a test\n\n"
                                "variant,run,class,dc,dc_std,recall,precision\n"
                                "rgb,1,grasper,50,1,50,50\n\n");
    const auto rows = read_runs_csv(p.string());
    fs::remove(p);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].record.grasper.dc == doctest::Approx(0.5));
    CHECK_FALSE(rows[0].record.lhook.defined);
}

TEST_CASE("the published-run fixture parses into 28 complete records") {
    const auto rows = read_runs_csv(std::string(FIXTURE_DIR) + "/reference_runs.csv");
    REQUIRE(rows.size() == 28);
    for (const RunMetrics& rm : rows) {
        CHECK(rm.record.grasper.defined);
        CHECK(rm.record.lhook.defined);
        CHECK(rm.record.mean.defined);
        CHECK(rm.record.grasper.dc > 0.5);
        CHECK(rm.record.grasper.dc < 1.0);
    }
    int rgb_runs = 0;
    for (const RunMetrics& rm : rows) rgb_runs += rm.variant == "rgb";
    CHECK(rgb_runs == 4);
}

TEST_CASE("summarize_runs averages repeats per variant in first-seen order") {
    std::vector<RunMetrics> rows;
    rows.push_back(run_row("rgb", 1, 0.70, 0.50));
    rows.push_back(run_row("t1_xy", 1, 0.80, 0.60));
    rows.push_back(run_row("rgb", 2, 0.74, 0.54));
    const auto summary = summarize_runs(rows);
    REQUIRE(summary.size() == 2);
    CHECK(summary[0].id == "rgb");
    CHECK(summary[0].label == "RGB");
    CHECK(summary[0].record.grasper.dc == doctest::Approx(0.72));
    CHECK(summary[0].record.lhook.dc == doctest::Approx(0.52));
    CHECK(summary[1].id == "t1_xy");
    CHECK(summary[1].label == "t1 XY");
    CHECK(summary[1].record.grasper.dc == doctest::Approx(0.80));
}

TEST_CASE("summarize_groups averages member variants") {
    std::vector<RunMetrics> rows;
    rows.push_back(run_row("t1_xy", 1, 0.80, 0.60));
    rows.push_back(run_row("t5_xy", 1, 0.70, 0.50));
    const auto variants = summarize_runs(rows);
    const std::vector<GroupSpec> groups = {{"XY", {"t1_xy", "t5_xy"}}};
    const auto out = summarize_groups(variants, groups);
    REQUIRE(out.size() == 1);
    CHECK(out[0].id == "XY");
    CHECK(out[0].record.grasper.dc == doctest::Approx(0.75));
    CHECK(out[0].record.lhook.dc == doctest::Approx(0.55));

    const std::vector<GroupSpec> missing = {{"PC", {"t1_pc", "t5_pc"}}};
    CHECK_THROWS_AS(summarize_groups(variants, missing), ValidationError);
}

TEST_CASE("text table renders percentages and dashes for undefined cells") {
    SummaryRow row;
    row.id = "rgb";
    row.label = "RGB";
    row.record.grasper = agg(0.75975, 0.0, 0.5, 0.25);
    row.record.recompute_mean();
    const std::string table = render_text_table("Test-set metrics", "Variant", {row});
    CHECK(table.find("Test-set metrics") != std::string::npos);
    CHECK(table.find("Variant") != std::string::npos);
    CHECK(table.find("Grasper DC") != std::string::npos);
    CHECK(table.find("75.98") != std::string::npos); // half-up at the second decimal
    CHECK(table.find("50.00") != std::string::npos);
    CHECK(table.find("25.00") != std::string::npos);
    CHECK(table.find("-") != std::string::npos); // undefined l-hook cells
}

TEST_CASE("csv table emits one row per summary with a metric-triple header") {
    SummaryRow row;
    row.id = "t1_rgbof";
    row.label = "t1 RGBof";
    row.record.grasper = agg(0.7, 0.0, 0.8, 0.9);
    row.record.lhook = agg(0.4, 0.0, 0.5, 0.6);
    row.record.recompute_mean();
    const std::string csv = render_csv_table("id", {row});
    const auto lines = util::split(util::trim(csv), '\n');
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] ==
          "id,grasper_dc,grasper_recall,grasper_precision,lhook_dc,lhook_recall,lhook_precision,"
          "mean_dc,mean_recall,mean_precision");
    CHECK(lines[1] == "t1_rgbof,70.00,80.00,90.00,40.00,50.00,60.00,55.00,65.00,75.00");
}

TEST_CASE("per-run text includes the dice spread column") {
    const std::vector<RunMetrics> rows = {run_row("t5_pc", 3, 0.6, 0.3)};
    const std::string text = render_runs_text(rows);
    CHECK(text.find("t5 PC") != std::string::npos);
    CHECK(text.find("+-") != std::string::npos);
    CHECK(text.find("60.00 +- 1.000") != std::string::npos);
}

TEST_CASE("contact sheet lays out eight panels with a white frame") {
    const Image sheet = flow_contact_sheet(32);
    CHECK(sheet.width == 4 * 32 + 5 * 2);
    CHECK(sheet.height == 2 * 32 + 3 * 2);
    CHECK(sheet.channels == 3);
    for (float v : sheet.data) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
    for (int ch = 0; ch < 3; ++ch) {
        CHECK(sheet.at(0, 0, ch) == 1.0f);
        CHECK(sheet.at(sheet.width - 1, sheet.height - 1, ch) == 1.0f);
    }
    // Panel 1 is a uniform rightward field; under per-image-max scaling it
    // saturates to pure red.
    const int cx = 2 + 1 * (32 + 2) + 16, cy = 2 + 16;
    CHECK(sheet.at(cx, cy, 0) == doctest::Approx(1.0f));
    CHECK(sheet.at(cx, cy, 1) == doctest::Approx(0.0f));
    CHECK(sheet.at(cx, cy, 2) == doctest::Approx(0.0f));

    CHECK_THROWS_AS(flow_contact_sheet(4), ValidationError);
}

TEST_CASE("write_text_file round-trips bytes") {
    const fs::path p = temp_csv("flowseg_text_roundtrip.txt");
    const std::string content = "line one\nline two\n";
    write_text_file(p.string(), content);
    const auto bytes = util::read_file_bytes(p.string());
    fs::remove(p);
    CHECK(std::string(bytes.begin(), bytes.end()) == content);
}
