#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace flowseg {

// Filesystem layout of one experiment's outputs under a single root:
//   manifest.tsv, dataset_stats.{txt,csv}, index.tsv,
//   flow/t<offset>/case<id>/clip<id>/frame<index>.flo,
//   repr/t<offset>/<encoding>/... (.png for rgbof, .flo containers otherwise),
//   checkpoints/<variant>/run<k>.ckpt, runs/<variant>_run<k>_*.csv,
//   report/...
struct ArtifactPaths {
    std::string root;

    explicit ArtifactPaths(std::string root_dir) : root(std::move(root_dir)) {}

    std::string manifest() const { return root + "/manifest.tsv"; }
    std::string stats_text() const { return root + "/dataset_stats.txt"; }
    std::string stats_csv() const { return root + "/dataset_stats.csv"; }
    std::string index() const { return root + "/index.tsv"; }
    std::string resolved_config(const std::string& stage) const {
        return root + "/config." + stage + ".resolved.ini";
    }

    std::string flow_dir(int offset) const { return root + "/flow/t" + std::to_string(offset); }
    std::string flo_path(int offset, int case_id, int clip_id, int frame_index) const;

    std::string repr_dir(int offset, const std::string& encoding) const {
        return root + "/repr/t" + std::to_string(offset) + "/" + encoding;
    }
    std::string repr_path(int offset, const std::string& encoding, int case_id, int clip_id,
                          int frame_index, const std::string& ext) const;

    std::string checkpoint(const std::string& variant, int run) const {
        return root + "/checkpoints/" + variant + "/run" + std::to_string(run) + ".ckpt";
    }
    std::string runs_dir() const { return root + "/runs"; }
    std::string history_csv(const std::string& variant, int run) const {
        return runs_dir() + "/" + variant + "_run" + std::to_string(run) + "_history.csv";
    }
    std::string run_metrics_csv(const std::string& variant, int run) const {
        return runs_dir() + "/" + variant + "_run" + std::to_string(run) + "_metrics.csv";
    }
    std::string report_dir() const { return root + "/report"; }
};

// mkdir -p; throws ValidationError when the path exists as a non-directory.
void ensure_dir(const std::string& path);
void ensure_parent_dir(const std::string& file_path);

// Content-hash ledger behind the pipeline's idempotence: a stage is skipped
// when its key is recorded and the artifact's bytes still hash to the stored
// value, so stale or hand-edited outputs are rebuilt instead of trusted.
class CompletionIndex {
  public:
    explicit CompletionIndex(std::string path);

    void load(); // a missing file is an empty index
    void save() const;

    bool fresh(const std::string& key, const std::string& artifact) const;
    void mark(const std::string& key, const std::string& artifact);
    size_t size() const { return entries_.size(); }

  private:
    std::string path_;
    std::map<std::string, uint64_t> entries_;
};

} // namespace flowseg
