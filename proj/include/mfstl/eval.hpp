#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "mfstl/ensemble.hpp"
#include "mfstl/graph.hpp"
#include "mfstl/metrics.hpp"

namespace mfstl {

/// Abnormal is the positive class.
struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const noexcept { return tp + tn + fp + fn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct DetectorScore {
    ConfusionCounts counts;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Metrics from counts; each ratio with a zero denominator is 0.
DetectorScore score_counts(const ConfusionCounts& c) noexcept;

DetectorScore score_detector(std::span<const Label> verdicts, std::span<const Label> truths);

struct SweepGrid {
    std::vector<double> windows;     // delta-w values, seconds
    std::vector<double> thresholds;  // r_c values
    /// Mean characteristic vector per cell, row-major [window][threshold].
    std::vector<CharacteristicVector> cells;

    const CharacteristicVector& at(std::size_t w, std::size_t r) const {
        return cells.at(w * thresholds.size() + r);
    }
};

inline const std::vector<double> kDefaultSweepWindows = {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
inline const std::vector<double> kDefaultSweepThresholds = {0.0, 0.1, 0.2, 0.3, 0.4,
                                                            0.5, 0.6, 0.7, 0.8, 0.9};

/// Rebuilds every sample's graph for each (window, threshold) cell and
/// averages the characteristics over samples. `base` supplies the node,
/// edge and protocol settings.
SweepGrid param_sweep(const std::vector<SamplePartition>& samples, const std::vector<double>& windows,
                      const std::vector<double>& thresholds, const SimilarityWeights& w,
                      const ServicePortMap& map, const BuildParams& base = {},
                      const MetricOptions& opts = {});

/// `dw,rc,metric,name,value`, one row per cell and characteristic.
void write_sweep_csv(std::ostream& out, const SweepGrid& grid);

struct ClusterSweepRow {
    std::size_t intervals = 0;
    double accuracy = 0.0;
};

/// Full IFSE-AD train and classify for each interval count.
std::vector<ClusterSweepRow> cluster_sweep(std::span<const CharacteristicVector> train,
                                           std::span<const Label> train_labels,
                                           std::span<const CharacteristicVector> test,
                                           std::span<const Label> test_labels,
                                           const std::vector<std::size_t>& interval_counts,
                                           const IfsParams& base, double tau_c,
                                           CollapseMode collapse = CollapseMode::WeightedAverage);

/// `m,acc`.
void write_cluster_sweep_csv(std::ostream& out, const std::vector<ClusterSweepRow>& rows);

}  // namespace mfstl
