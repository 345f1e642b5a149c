#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flowseg/dataset.hpp"
#include "flowseg/raster.hpp"

namespace flowseg {

// Pixel-level tallies for one class, additive across frames.
struct ConfusionCounts {
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;

    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
};

ConfusionCounts confusion_counts(const LabelMask& pred, const LabelMask& gt, int cls);

struct FrameClassMetrics {
    double dc = 0.0;
    double recall = 0.0;
    double precision = 0.0;
};

// Dice 2TP/(2TP+FP+FN), recall TP/(TP+FN), precision TP/(TP+FP). Returns
// nullopt when the class appears in neither mask: such frames are excluded
// from per-class averaging rather than counted as zeros. A ratio with an
// empty denominator (class on one side only) is 0.
std::optional<FrameClassMetrics> frame_metrics(const LabelMask& pred, const LabelMask& gt, int cls);

// Per-class summary over the included frames. The spread is the population
// standard deviation of the per-frame Dice values.
struct ClassAggregate {
    bool defined = false; // false when the class appeared in no frame
    double dc = 0.0;
    double dc_std = 0.0;
    double recall = 0.0;
    double precision = 0.0;
};

// One table row: the two instrument classes plus their arithmetic mean.
struct MetricsRecord {
    ClassAggregate grasper;
    ClassAggregate lhook;
    ClassAggregate mean;

    // mean = element-wise average of the defined class aggregates.
    void recompute_mean();
};

// Streams (pred, gt) frame pairs and produces the per-class aggregates.
class MetricsAccumulator {
  public:
    void add_frame(const LabelMask& pred, const LabelMask& gt);
    MetricsRecord finalize() const;
    size_t frames() const { return frames_; }

  private:
    struct PerClass {
        std::vector<double> dc, recall, precision;
    };
    PerClass cls_[2]; // grasper, l-hook
    size_t frames_ = 0;
};

// Element-wise arithmetic mean over one variant's repeated trainings.
MetricsRecord average_runs(const std::vector<MetricsRecord>& runs);

// A named set of variants averaged together in the grouped summary.
struct GroupSpec {
    std::string name;
    std::vector<std::string> members; // variant ids
};

// OF (all six flow variants), t1, t5, RGBof, XY, PC.
const std::vector<GroupSpec>& default_groups();

// Element-wise mean over the group's member records; throws when a member is
// missing from `variant_names`.
MetricsRecord group_means(const std::vector<std::string>& variant_names,
                          const std::vector<MetricsRecord>& variant_records,
                          const GroupSpec& group);

} // namespace flowseg
