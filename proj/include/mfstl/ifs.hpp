#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mfstl/flow.hpp"

namespace mfstl {

/// Intuitionistic fuzzy triple: membership, non-membership, hesitation.
struct IntuitionisticValue {
    double mu = 0.0;
    double gamma = 0.0;
    double pi = 1.0;

    /// Builds a triple from (mu, gamma), clamping rounding noise so that
    /// mu + gamma <= 1 and pi = 1 - mu - gamma >= 0.
    static IntuitionisticValue from(double mu, double gamma) noexcept;

    bool valid() const noexcept;

    friend bool operator==(const IntuitionisticValue&, const IntuitionisticValue&) = default;
};

struct FcmOptions {
    double fuzzifier = 2.0;
    double tolerance = 1e-6;  // on center movement, relative to the data range
    int max_iterations = 300;
};

/// One-dimensional fuzzy C-means. Centers start at the (k - 0.5)/m empirical
/// quantiles and are returned ascending. Throws if there are fewer than m
/// distinct values.
std::vector<double> fcm_centers(std::span<const double> values, std::size_t m,
                                const FcmOptions& opts = {});

/// Interval bounds d_0 < ... < d_m: the outer bounds extend the data range by
/// the margins, interior bounds are midpoints of adjacent centers.
std::vector<double> partition_domain(std::span<const double> values, std::span<const double> centers,
                                     double margin_low, double margin_high);

/// Yager complement (1 - mu^beta)^(1/beta), beta in (0, 1].
double nonmembership(double mu, double beta);

struct Tally {
    std::uint64_t abnormal = 0;
    std::uint64_t normal = 0;

    std::uint64_t total() const noexcept { return abnormal + normal; }
    friend bool operator==(const Tally&, const Tally&) = default;
};

struct DistinctionResult {
    std::vector<std::size_t> abnormal_set;  // AC, ascending interval indices
    std::vector<std::size_t> normal_set;    // NC
    double tau = 0.0;
    double eta = 0.0;
    bool degenerate = false;  // training instances all of one class
};

/// Exhaustive search over all non-trivial bipartitions of the intervals for
/// the one that maximises eta = TT - TF + FF - FT. Bipartitions leaving one
/// side without instances are skipped when any other exists. Ties go to the
/// smaller AC, then the lexicographically smaller AC.
DistinctionResult distinction_partition(std::span<const Tally> tallies);

struct IfsParams {
    std::size_t intervals = 10;  // m
    double alpha = 0.2;          // boundary hesitation
    double beta = 0.8;           // Yager exponent
    double margin_fraction = 0.05;
    FcmOptions fcm;

    void validate() const;
};

/// Trained fuzzy model of one characteristic.
struct CharacteristicModel {
    std::vector<double> centers;  // v_1 < ... < v_m
    std::vector<double> bounds;   // d_0 < ... < d_m
    double margin_low = 0.0;
    double margin_high = 0.0;
    double alpha = 0.2;
    double beta = 0.8;
    std::vector<std::size_t> abnormal_set;
    std::vector<std::size_t> normal_set;
    double tau = 0.0;
    std::vector<Tally> tallies;
    /// Set when the training series could not support two intervals or held a
    /// single class; such a model always answers normal and carries tau = 0.
    bool degenerate = false;

    std::size_t interval_count() const noexcept { return centers.size(); }
    bool in_abnormal_set(std::size_t interval) const noexcept;

    /// Gaussian membership of x in interval i (0-based).
    double membership(double x, std::size_t interval) const;
    /// Spread sigma^2 of interval i.
    double variance(std::size_t interval) const;

    /// Index of the interval [d_{i-1}, d_i] containing x (clamped to the ends).
    std::size_t interval_of(double x) const noexcept;
};

/// Fits centers, bounds, tallies and the AC/NC split from a training series
/// and its sample labels. If the series has fewer distinct values than the
/// requested interval count, the count drops to the number of distinct
/// values; below two the model is degenerate.
CharacteristicModel train_characteristic(std::span<const double> values, std::span<const Label> labels,
                                         const IfsParams& params);

/// One triple per interval.
std::vector<IntuitionisticValue> ifs_of_value(double x, const CharacteristicModel& model);

/// Index of the interval with the largest membership; ties go to the nearer
/// center, then to the lower index.
std::size_t best_interval(double x, const CharacteristicModel& model);

/// Single-characteristic detector: abnormal iff the max-membership interval
/// belongs to AC.
Label ifs_ad_classify(double x, const CharacteristicModel& model);

}  // namespace mfstl
