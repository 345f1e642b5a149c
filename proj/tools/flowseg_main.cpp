#include <atomic>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "flowseg/artifacts.hpp"
#include "flowseg/config.hpp"
#include "flowseg/flo_io.hpp"
#include "flowseg/flow_ops.hpp"
#include "flowseg/metrics.hpp"
#include "flowseg/png_io.hpp"
#include "flowseg/report.hpp"
#include "flowseg/resample.hpp"
#include "flowseg/train.hpp"
#include "flowseg/util.hpp"
#include "flowseg/variants.hpp"

namespace fs = std::filesystem;
using namespace flowseg;

namespace {

std::string manifest_path(const ExperimentConfig& cfg, const ArtifactPaths& paths) {
    return cfg.dataset.manifest.empty() ? paths.manifest() : cfg.dataset.manifest;
}

DatasetManifest load_manifest_or_die(const ExperimentConfig& cfg, const ArtifactPaths& paths) {
    const std::string path = manifest_path(cfg, paths);
    if (!fs::exists(path))
        throw MissingArtifactError("manifest not found at " + path +
                                   "; run `flowseg prepare` (or `flowseg synth`) first");
    DatasetManifest m = read_manifest(path);
    validate_manifest(m);
    return m;
}

void write_resolved(const ExperimentConfig& cfg, const ArtifactPaths& paths,
                    const std::string& stage) {
    ensure_dir(paths.root);
    write_text_file(paths.resolved_config(stage), render_config(cfg));
}

// Index-chunked worker pool. The first exception wins and is rethrown on the
// caller's thread after all workers drain.
void parallel_for(int workers, size_t n, const std::function<void(size_t)>& fn) {
    workers = static_cast<int>(std::min<size_t>(std::max(workers, 1), std::max<size_t>(n, 1)));
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            while (!failed.load()) {
                const size_t i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true);
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

int variant_rank(const std::string& name) {
    const auto& matrix = all_variants();
    for (size_t i = 0; i < matrix.size(); ++i)
        if (matrix[i].name == name) return static_cast<int>(i);
    return static_cast<int>(matrix.size());
}

// ---------------------------------------------------------------- synth ----

void cmd_synth(const ExperimentConfig& cfg) {
    const ArtifactPaths paths(cfg.run.out);
    write_resolved(cfg, paths, "synth");
    util::log_info("generating synthetic dataset under " + cfg.dataset.root);
    const DatasetManifest m = synth_dataset(cfg.run.seed, cfg.synth, cfg.dataset.root);
    const std::string mpath = manifest_path(cfg, paths);
    ensure_parent_dir(mpath);
    write_manifest(m, mpath);
    const ClassBalance b = class_balance_stats(m);
    std::cout << "synthetic dataset: " << m.cases.size() << " cases, " << b.frames << " frames ("
              << b.grasper_frames << " slow-class, " << b.lhook_frames
              << " fast-class), manifest at " << mpath << "\n";
}

// -------------------------------------------------------------- prepare ----

struct SubsetStats {
    std::string name;
    size_t cases = 0;
    ClassBalance balance;
};

std::string stats_text(const std::vector<SubsetStats>& rows, size_t total_frames,
                       const std::string& class_map) {
    std::string out = "Dataset statistics (a frame counts for a class when at least one pixel "
                      "carries its label; class map: " +
                      class_map + ")\n";
    out += "subset  cases  frames  slow/grasper  pct     fast/l-hook  pct     share\n";
    char line[160];
    for (const SubsetStats& r : rows) {
        const double share =
            total_frames ? 100.0 * static_cast<double>(r.balance.frames) / total_frames : 0.0;
        std::snprintf(line, sizeof(line), "%-7s %5zu %7zu %13zu %6s%% %12zu %6s%% %6s%%\n",
                      r.name.c_str(), r.cases, r.balance.frames, r.balance.grasper_frames,
                      util::format_fixed(r.balance.grasper_pct(), 2).c_str(),
                      r.balance.lhook_frames, util::format_fixed(r.balance.lhook_pct(), 2).c_str(),
                      util::format_fixed(share, 2).c_str());
        out += line;
    }
    return out;
}

std::string stats_csv(const std::vector<SubsetStats>& rows, size_t total_frames) {
    std::string out = "subset,cases,frames,grasper_frames,grasper_pct,lhook_frames,lhook_pct,"
                      "share_pct\n";
    for (const SubsetStats& r : rows) {
        const double share =
            total_frames ? 100.0 * static_cast<double>(r.balance.frames) / total_frames : 0.0;
        out += r.name + "," + std::to_string(r.cases) + "," + std::to_string(r.balance.frames) +
               "," + std::to_string(r.balance.grasper_frames) + "," +
               util::format_fixed(r.balance.grasper_pct(), 2) + "," +
               std::to_string(r.balance.lhook_frames) + "," +
               util::format_fixed(r.balance.lhook_pct(), 2) + "," +
               util::format_fixed(share, 2) + "\n";
    }
    return out;
}

void cmd_prepare(const ExperimentConfig& cfg) {
    const ArtifactPaths paths(cfg.run.out);
    write_resolved(cfg, paths, "prepare");

    const ClassMap map = ClassMap::parse(cfg.dataset.class_map);
    util::log_info("scanning " + cfg.dataset.root);
    DatasetManifest m = build_manifest(cfg.dataset.root, cfg.dataset.names, map);
    validate_manifest(m);
    if (m.empty()) throw ValidationError(cfg.dataset.root + " holds no recognizable cases");

    const CaseSplit split = resolve_split(cfg);
    validate_split(m, split);
    const SplitManifests sm = split_by_cases(m, split);

    const std::string mpath = manifest_path(cfg, paths);
    ensure_parent_dir(mpath);
    write_manifest(m, mpath);

    std::vector<SubsetStats> rows = {
        {"train", split.train.size(), class_balance_stats(sm.train)},
        {"val", split.validation.size(), class_balance_stats(sm.validation)},
        {"test", split.test.size(), class_balance_stats(sm.test)},
        {"total", m.cases.size(), class_balance_stats(m)},
    };
    const size_t total = m.frame_count();
    const std::string text = stats_text(rows, total, cfg.dataset.class_map);
    write_text_file(paths.stats_text(), text);
    write_text_file(paths.stats_csv(), stats_csv(rows, total));

    CompletionIndex index(paths.index());
    index.load();
    index.mark("prepare/manifest", mpath);
    index.mark("prepare/stats", paths.stats_csv());
    index.save();

    std::cout << text;
    std::cout << "manifest: " << mpath << " (" << total << " frames)\n";
}

// ----------------------------------------------------------- flow, repr ----

struct FrameJob {
    const CaseRecord* cr = nullptr;
    const ClipRecord* clip = nullptr;
    size_t pos = 0;
    size_t ref = 0;
    int offset = 0;
};

std::vector<FrameJob> flow_jobs(const DatasetManifest& m, const ExperimentConfig& cfg) {
    std::vector<FrameJob> jobs;
    size_t boundary = 0;
    for (int offset : cfg.flow.offsets) {
        FlowPairing pairing;
        pairing.offset = offset;
        pairing.boundary = cfg.flow.boundary;
        validate_pairing(pairing);
        for (const CaseRecord& cr : m.cases)
            for (const ClipRecord& clip : cr.clips)
                for (size_t pos = 0; pos < clip.frames.size(); ++pos) {
                    const auto ref = reference_index(pos, clip.frames.size(), pairing);
                    if (!ref) {
                        ++boundary;
                        continue;
                    }
                    jobs.push_back({&cr, &clip, pos, *ref, offset});
                }
    }
    if (boundary)
        util::log_info(std::to_string(boundary) +
                       " frames precede their pairing offset and use a zero field");
    return jobs;
}

void cmd_flow(const ExperimentConfig& cfg) {
    const ArtifactPaths paths(cfg.run.out);
    write_resolved(cfg, paths, "flow");
    const DatasetManifest m = load_manifest_or_die(cfg, paths);

    CompletionIndex index(paths.index());
    index.load();
    const std::vector<FrameJob> jobs = flow_jobs(m, cfg);

    std::mutex mark_mutex;
    std::atomic<size_t> computed{0}, skipped{0};
    parallel_for(cfg.run.workers, jobs.size(), [&](size_t i) {
        const FrameJob& job = jobs[i];
        const FrameRecord& fr = job.clip->frames[job.pos];
        const std::string out =
            paths.flo_path(job.offset, job.cr->case_id, job.clip->clip_id, fr.index);
        const std::string key = "flow/t" + std::to_string(job.offset) + "/case" +
                                std::to_string(job.cr->case_id) + "/clip" +
                                std::to_string(job.clip->clip_id) + "/frame" +
                                std::to_string(fr.index);
        {
            std::lock_guard<std::mutex> lock(mark_mutex);
            if (index.fresh(key, out)) {
                skipped.fetch_add(1);
                return;
            }
        }
        const Image a = read_image_png(m.root + "/" + fr.image_path);
        const Image b = read_image_png(m.root + "/" + job.clip->frames[job.ref].image_path);
        const TilingPlan plan =
            plan_tiles(a.width, a.height, cfg.flow.tile_size, cfg.flow.blend);
        const FlowField f = estimate_stitched_flow(a, b, plan, cfg.flow.pyr, cfg.flow.hs);
        ensure_parent_dir(out);
        write_flo(out, f);
        {
            std::lock_guard<std::mutex> lock(mark_mutex);
            index.mark(key, out);
        }
        const size_t done = computed.fetch_add(1) + 1;
        if (done % 50 == 0) util::log_info("flow: " + std::to_string(done) + " fields done");
    });
    index.save();
    std::cout << "flow: " << computed.load() << " fields computed, " << skipped.load()
              << " already up to date\n";
}

void cmd_repr(const ExperimentConfig& cfg) {
    const ArtifactPaths paths(cfg.run.out);
    write_resolved(cfg, paths, "repr");
    const DatasetManifest m = load_manifest_or_die(cfg, paths);

    CompletionIndex index(paths.index());
    index.load();
    const std::vector<FrameJob> base = flow_jobs(m, cfg);

    struct ReprJob {
        FrameJob frame;
        EncodingKind kind;
    };
    std::vector<ReprJob> jobs;
    for (EncodingKind kind : cfg.repr.encodings)
        for (const FrameJob& fj : base) jobs.push_back({fj, kind});

    std::mutex mark_mutex;
    std::atomic<size_t> computed{0}, skipped{0};
    parallel_for(cfg.run.workers, jobs.size(), [&](size_t i) {
        const ReprJob& job = jobs[i];
        const FrameRecord& fr = job.frame.clip->frames[job.frame.pos];
        const std::string enc_name = encoding_name(job.kind);
        const std::string ext = job.kind == EncodingKind::RGBof ? ".png" : ".flo";
        const std::string out = paths.repr_path(job.frame.offset, enc_name,
                                                job.frame.cr->case_id, job.frame.clip->clip_id,
                                                fr.index, ext);
        const std::string key = "repr/t" + std::to_string(job.frame.offset) + "/" + enc_name +
                                "/case" + std::to_string(job.frame.cr->case_id) + "/clip" +
                                std::to_string(job.frame.clip->clip_id) + "/frame" +
                                std::to_string(fr.index);
        {
            std::lock_guard<std::mutex> lock(mark_mutex);
            if (index.fresh(key, out)) {
                skipped.fetch_add(1);
                return;
            }
        }
        const std::string flo = paths.flo_path(job.frame.offset, job.frame.cr->case_id,
                                               job.frame.clip->clip_id, fr.index);
        if (!fs::exists(flo))
            throw MissingArtifactError(flo + " is missing; run `flowseg flow` first");
        FlowField f = read_flo(flo);
        const Image frame_img = read_image_png(m.root + "/" + fr.image_path);
        if (f.width != frame_img.width || f.height != frame_img.height)
            f = rescale_flow(f, frame_img.width, frame_img.height);
        const FlowEncoding enc = encode_flow(f, job.kind, cfg.repr.norm);
        ensure_parent_dir(out);
        if (job.kind == EncodingKind::RGBof) {
            write_image_png(out, enc.planes);
        } else {
            FlowField planes;
            planes.width = enc.planes.width;
            planes.height = enc.planes.height;
            planes.u.resize(static_cast<size_t>(planes.width) * planes.height);
            planes.v.resize(planes.u.size());
            for (int y = 0; y < planes.height; ++y)
                for (int x = 0; x < planes.width; ++x) {
                    planes.u[planes.idx(x, y)] = enc.planes.at(x, y, 0);
                    planes.v[planes.idx(x, y)] = enc.planes.at(x, y, 1);
                }
            write_flo(out, planes);
        }
        {
            std::lock_guard<std::mutex> lock(mark_mutex);
            index.mark(key, out);
        }
        computed.fetch_add(1);
    });
    index.save();
    std::cout << "repr: " << computed.load() << " renders written, " << skipped.load()
              << " already up to date\n";
}

// ---------------------------------------------------------- train, eval ----

VariantSpec variant_with_boundary(const VariantSpec& v, const ExperimentConfig& cfg) {
    VariantSpec out = v;
    if (out.pairing) out.pairing->boundary = cfg.flow.boundary;
    return out;
}

void cmd_train(const ExperimentConfig& cfg) {
    const ArtifactPaths paths(cfg.run.out);
    write_resolved(cfg, paths, "train");
    const DatasetManifest m = load_manifest_or_die(cfg, paths);
    const CaseSplit split = resolve_split(cfg);
    validate_split(m, split);
    const SplitManifests sm = split_by_cases(m, split);
    const ClassMap map = ClassMap::parse(cfg.dataset.class_map);

    NetworkConfig nc;
    nc.classes = kNumClasses;
    nc.depth = cfg.net.depth;
    nc.base_width = cfg.net.base_width;

    CompletionIndex index(paths.index());
    index.load();

    for (const VariantSpec& raw : parse_variant_list(cfg.run.variants)) {
        const VariantSpec v = variant_with_boundary(raw, cfg);

        bool all_fresh = true;
        for (int k = 1; k <= cfg.train.repeats; ++k)
            all_fresh = all_fresh && index.fresh("train/" + v.name + "/run" + std::to_string(k),
                                                 paths.checkpoint(v.name, k));
        if (all_fresh) {
            std::cout << "train " << v.name << ": all " << cfg.train.repeats
                      << " runs up to date\n";
            continue;
        }

        util::log_info("loading samples for " + v.name);
        const std::vector<TrainSample> train_s = load_samples(sm.train, v, map, paths);
        const std::vector<TrainSample> val_s = load_samples(sm.validation, v, map, paths);
        const ChannelStats stats = compute_channel_stats(train_s, v, cfg.repr.norm);

        for (int k = 1; k <= cfg.train.repeats; ++k) {
            const std::string key = "train/" + v.name + "/run" + std::to_string(k);
            const std::string ckpt = paths.checkpoint(v.name, k);
            if (index.fresh(key, ckpt)) {
                std::cout << "train " << v.name << " run " << k << ": up to date\n";
                continue;
            }
            const uint64_t run_seed =
                util::derive_seed(cfg.run.seed, v.name + "/rep" + std::to_string(k));
            util::log_info("training " + v.name + " run " + std::to_string(k) + " (seed " +
                           std::to_string(run_seed) + ")");
            const RunResult r = train_one(train_s, val_s, v, cfg.repr.norm, stats, nc, cfg.train,
                                          cfg.augment, run_seed);

            ensure_parent_dir(ckpt);
            save_checkpoint(r.model, ckpt);

            std::string hist = "epoch,train_loss,val_loss\n";
            char line[96];
            for (size_t e = 0; e < r.history.size(); ++e) {
                std::snprintf(line, sizeof(line), "%zu,%.10g,%.10g\n", e + 1,
                              r.history[e].train_loss, r.history[e].val_loss);
                hist += line;
            }
            ensure_dir(paths.runs_dir());
            write_text_file(paths.history_csv(v.name, k), hist);

            index.mark(key, ckpt);
            index.save();
            std::cout << "train " << v.name << " run " << k << ": best epoch " << r.best_epoch
                      << ", final train loss "
                      << util::format_fixed(r.history.back().train_loss, 4) << ", val loss "
                      << util::format_fixed(r.history.back().val_loss, 4) << "\n";
        }
    }
}

void cmd_eval(const ExperimentConfig& cfg) {
    const ArtifactPaths paths(cfg.run.out);
    write_resolved(cfg, paths, "eval");
    const DatasetManifest m = load_manifest_or_die(cfg, paths);
    const CaseSplit split = resolve_split(cfg);
    validate_split(m, split);
    const SplitManifests sm = split_by_cases(m, split);
    const ClassMap map = ClassMap::parse(cfg.dataset.class_map);

    CompletionIndex index(paths.index());
    index.load();

    for (const VariantSpec& raw : parse_variant_list(cfg.run.variants)) {
        const VariantSpec v = variant_with_boundary(raw, cfg);
        std::vector<TrainSample> test_s; // loaded lazily, shared across runs

        for (int k = 1; k <= cfg.train.repeats; ++k) {
            const std::string key = "eval/" + v.name + "/run" + std::to_string(k);
            const std::string csv_path = paths.run_metrics_csv(v.name, k);
            if (index.fresh(key, csv_path)) {
                std::cout << "eval " << v.name << " run " << k << ": up to date\n";
                continue;
            }
            const std::string ckpt = paths.checkpoint(v.name, k);
            if (!fs::exists(ckpt))
                throw MissingArtifactError(ckpt + " is missing; run `flowseg train` first");
            UNet<float> model = load_checkpoint(ckpt);
            if (test_s.empty()) test_s = load_samples(sm.test, v, map, paths);

            const MetricsRecord rec = evaluate_samples(model, test_s, v, cfg.repr.norm);
            ensure_dir(paths.runs_dir());
            write_runs_csv(csv_path, {{v.name, k, rec}});
            index.mark(key, csv_path);
            index.save();

            std::cout << "eval " << v.name << " run " << k << ": mean DC "
                      << util::format_pct(rec.mean.dc) << "% (slow/grasper "
                      << util::format_pct(rec.grasper.dc) << "%, fast/l-hook "
                      << util::format_pct(rec.lhook.dc) << "%)\n";
        }
    }
}

// --------------------------------------------------------------- report ----

std::vector<RunMetrics> collect_runs(const std::string& where) {
    std::vector<RunMetrics> rows;
    if (fs::is_directory(where)) {
        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(where))
            if (entry.is_regular_file() && entry.path().extension() == ".csv")
                files.push_back(entry.path().string());
        std::sort(files.begin(), files.end());
        for (const std::string& f : files)
            for (RunMetrics& rm : read_runs_csv(f)) rows.push_back(std::move(rm));
    } else if (fs::exists(where)) {
        rows = read_runs_csv(where);
    } else {
        throw MissingArtifactError("no run metrics at " + where +
                                   "; run `flowseg eval` or point --runs at a metrics CSV");
    }
    if (rows.empty()) throw MissingArtifactError("no run metrics found under " + where);
    std::stable_sort(rows.begin(), rows.end(), [](const RunMetrics& a, const RunMetrics& b) {
        const int ra = variant_rank(a.variant), rb = variant_rank(b.variant);
        if (ra != rb) return ra < rb;
        if (a.variant != b.variant) return a.variant < b.variant;
        return a.run < b.run;
    });
    return rows;
}

void cmd_report(const ExperimentConfig& cfg, const std::string& runs_override) {
    const ArtifactPaths paths(cfg.run.out);
    write_resolved(cfg, paths, "report");
    const std::string where = runs_override.empty() ? paths.runs_dir() : runs_override;

    const std::vector<RunMetrics> rows = collect_runs(where);
    const std::vector<SummaryRow> variants = summarize_runs(rows);

    std::vector<SummaryRow> groups;
    for (const GroupSpec& g : default_groups()) {
        try {
            std::vector<SummaryRow> one = summarize_groups(variants, {g});
            groups.push_back(std::move(one.front()));
        } catch (const ValidationError&) {
            util::log_warn("group " + g.name + " skipped: not all member variants are present");
        }
    }

    const std::string variant_table =
        render_text_table("Test-set metrics by input variant (runs averaged)", "Variant",
                          variants);
    std::string report_text = render_runs_text(rows) + "\n" + variant_table;
    if (!groups.empty())
        report_text +=
            "\n" + render_text_table("Grouped means by input type", "Group", groups);

    ensure_dir(paths.report_dir());
    write_text_file(paths.report_dir() + "/tables.txt", report_text);
    write_text_file(paths.report_dir() + "/variants.csv", render_csv_table("variant", variants));
    if (!groups.empty())
        write_text_file(paths.report_dir() + "/groups.csv", render_csv_table("group", groups));
    write_image_png(paths.report_dir() + "/flow_panels.png", flow_contact_sheet(96));

    std::cout << variant_table;
    if (!groups.empty())
        std::cout << "\n" << render_text_table("Grouped means by input type", "Group", groups);
    std::cout << "report written to " << paths.report_dir() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optical-flow-augmented surgical instrument segmentation pipeline"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path;
    uint64_t seed_flag = 0;
    int workers_flag = 1;
    std::string variants_flag;
    std::string out_flag;

    auto* config_opt = app.add_option("--config", config_path, "Experiment config file")
                           ->envname("FLOWSEG_CONFIG")
                           ->check(CLI::ExistingFile);
    auto* seed_opt =
        app.add_option("--seed", seed_flag, "Global seed override")->envname("FLOWSEG_SEED");
    auto* workers_opt = app.add_option("--workers", workers_flag, "Worker threads for flow/repr")
                            ->envname("FLOWSEG_WORKERS");
    auto* variants_opt =
        app.add_option("--variants", variants_flag,
                       "Comma-separated variant list (rgb, t1_rgbof, ..., or 'all')")
            ->envname("FLOWSEG_VARIANTS");
    auto* out_opt =
        app.add_option("--out", out_flag, "Output directory")->envname("FLOWSEG_OUT");

    auto* sc_synth =
        app.add_subcommand("synth", "Generate the synthetic dataset and its manifest");
    auto* sc_prepare =
        app.add_subcommand("prepare", "Scan the dataset, write the manifest and split stats");
    auto* sc_flow = app.add_subcommand("flow", "Estimate tiled flow fields for all frame pairs");
    auto* sc_repr = app.add_subcommand("repr", "Render flow encodings from the flow artifacts");
    auto* sc_train = app.add_subcommand("train", "Train the variant x repeat matrix");
    auto* sc_eval = app.add_subcommand("eval", "Evaluate checkpoints on the test split");
    auto* sc_report = app.add_subcommand("report", "Aggregate run metrics into the tables");
    std::string runs_override;
    sc_report->add_option("--runs", runs_override,
                          "Runs directory or a single metrics CSV (defaults to <out>/runs)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        ExperimentConfig cfg;
        if (config_opt->count()) cfg = load_config(config_path);
        if (seed_opt->count()) cfg.run.seed = seed_flag;
        if (workers_opt->count()) cfg.run.workers = workers_flag;
        if (variants_opt->count()) cfg.run.variants = variants_flag;
        if (out_opt->count()) cfg.run.out = out_flag;
        validate_config(cfg);

        if (app.got_subcommand(sc_synth)) cmd_synth(cfg);
        if (app.got_subcommand(sc_prepare)) cmd_prepare(cfg);
        if (app.got_subcommand(sc_flow)) cmd_flow(cfg);
        if (app.got_subcommand(sc_repr)) cmd_repr(cfg);
        if (app.got_subcommand(sc_train)) cmd_train(cfg);
        if (app.got_subcommand(sc_eval)) cmd_eval(cfg);
        if (app.got_subcommand(sc_report)) cmd_report(cfg, runs_override);
        return 0;
    } catch (const ValidationError& e) {
        util::log_error(e.what());
        return 1;
    } catch (const MissingArtifactError& e) {
        util::log_error(e.what());
        return 2;
    } catch (const std::exception& e) {
        util::log_error(std::string("internal error: ") + e.what());
        return 3;
    }
}
