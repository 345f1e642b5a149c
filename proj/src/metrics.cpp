#include "flowseg/metrics.hpp"

#include <cmath>

#include "flowseg/util.hpp"

namespace flowseg {

ConfusionCounts confusion_counts(const LabelMask& pred, const LabelMask& gt, int cls) {
    if (pred.width != gt.width || pred.height != gt.height)
        throw ValidationError("confusion_counts: mask sizes differ");
    ConfusionCounts c;
    const size_t n = pred.labels.size();
    for (size_t i = 0; i < n; ++i) {
        const bool p = pred.labels[i] == cls;
        const bool g = gt.labels[i] == cls;
        c.tp += p && g;
        c.fp += p && !g;
        c.fn += !p && g;
    }
    return c;
}

std::optional<FrameClassMetrics> frame_metrics(const LabelMask& pred, const LabelMask& gt,
                                               int cls) {
    const ConfusionCounts c = confusion_counts(pred, gt, cls);
    if (c.tp == 0 && c.fp == 0 && c.fn == 0) return std::nullopt;
    FrameClassMetrics m;
    const double denom_dc = static_cast<double>(2 * c.tp + c.fp + c.fn);
    m.dc = denom_dc > 0 ? 2.0 * static_cast<double>(c.tp) / denom_dc : 0.0;
    m.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    m.precision =
        c.tp + c.fp > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
    return m;
}

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size()));
}

ClassAggregate aggregate_class(const std::vector<double>& dc, const std::vector<double>& recall,
                               const std::vector<double>& precision) {
    ClassAggregate a;
    if (dc.empty()) return a;
    a.defined = true;
    a.dc = mean_of(dc);
    a.dc_std = population_std(dc, a.dc);
    a.recall = mean_of(recall);
    a.precision = mean_of(precision);
    return a;
}

} // namespace

void MetricsRecord::recompute_mean() {
    mean = ClassAggregate{};
    int n = 0;
    for (const ClassAggregate* a : {&grasper, &lhook}) {
        if (!a->defined) continue;
        mean.dc += a->dc;
        mean.dc_std += a->dc_std;
        mean.recall += a->recall;
        mean.precision += a->precision;
        ++n;
    }
    if (n == 0) return;
    mean.defined = true;
    mean.dc /= n;
    mean.dc_std /= n;
    mean.recall /= n;
    mean.precision /= n;
}

void MetricsAccumulator::add_frame(const LabelMask& pred, const LabelMask& gt) {
    for (int k = 0; k < 2; ++k) {
        const auto m = frame_metrics(pred, gt, k + 1);
        if (!m) continue;
        cls_[k].dc.push_back(m->dc);
        cls_[k].recall.push_back(m->recall);
        cls_[k].precision.push_back(m->precision);
    }
    ++frames_;
}

MetricsRecord MetricsAccumulator::finalize() const {
    MetricsRecord r;
    r.grasper = aggregate_class(cls_[0].dc, cls_[0].recall, cls_[0].precision);
    r.lhook = aggregate_class(cls_[1].dc, cls_[1].recall, cls_[1].precision);
    r.recompute_mean();
    return r;
}

namespace {

ClassAggregate average_aggregates(const std::vector<const ClassAggregate*>& parts,
                                  const char* label) {
    ClassAggregate out;
    for (const ClassAggregate* a : parts)
        if (a->defined != parts.front()->defined)
            throw ValidationError(std::string("averaging records with mismatched class sets (") +
                                  label + ")");
    if (!parts.front()->defined) return out;
    out.defined = true;
    for (const ClassAggregate* a : parts) {
        out.dc += a->dc;
        out.dc_std += a->dc_std;
        out.recall += a->recall;
        out.precision += a->precision;
    }
    const double n = static_cast<double>(parts.size());
    out.dc /= n;
    out.dc_std /= n;
    out.recall /= n;
    out.precision /= n;
    return out;
}

// Element-wise over every row, the mean row included: records loaded from
// fixture tables carry an independently rounded mean row, and averaging it
// directly matches the published arithmetic. For records we build ourselves
// the mean row is exactly (grasper + l-hook)/2, and linearity keeps that
// identity intact through the average.
MetricsRecord average_records(const std::vector<const MetricsRecord*>& recs) {
    std::vector<const ClassAggregate*> g, l, m;
    for (const MetricsRecord* r : recs) {
        g.push_back(&r->grasper);
        l.push_back(&r->lhook);
        m.push_back(&r->mean);
    }
    MetricsRecord out;
    out.grasper = average_aggregates(g, "grasper");
    out.lhook = average_aggregates(l, "l-hook");
    out.mean = average_aggregates(m, "mean");
    return out;
}

} // namespace

MetricsRecord average_runs(const std::vector<MetricsRecord>& runs) {
    if (runs.empty()) throw ValidationError("average_runs: no records");
    std::vector<const MetricsRecord*> ptrs;
    for (const MetricsRecord& r : runs) ptrs.push_back(&r);
    return average_records(ptrs);
}

const std::vector<GroupSpec>& default_groups() {
    static const std::vector<GroupSpec> groups = {
        {"OF", {"t1_rgbof", "t5_rgbof", "t1_xy", "t5_xy", "t1_pc", "t5_pc"}},
        {"t1", {"t1_rgbof", "t1_xy", "t1_pc"}},
        {"t5", {"t5_rgbof", "t5_xy", "t5_pc"}},
        {"RGBof", {"t1_rgbof", "t5_rgbof"}},
        {"XY", {"t1_xy", "t5_xy"}},
        {"PC", {"t1_pc", "t5_pc"}},
    };
    return groups;
}

MetricsRecord group_means(const std::vector<std::string>& variant_names,
                          const std::vector<MetricsRecord>& variant_records,
                          const GroupSpec& group) {
    if (variant_names.size() != variant_records.size())
        throw ValidationError("group_means: name/record count mismatch");
    std::vector<const MetricsRecord*> members;
    for (const std::string& member : group.members) {
        const MetricsRecord* found = nullptr;
        for (size_t i = 0; i < variant_names.size(); ++i)
            if (variant_names[i] == member) {
                found = &variant_records[i];
                break;
            }
        if (!found)
            throw ValidationError("group '" + group.name + "' needs variant '" + member +
                                  "' but no record was supplied");
        members.push_back(found);
    }
    return average_records(members);
}

} // namespace flowseg
