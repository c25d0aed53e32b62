#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "mfstl/ifs.hpp"
#include "mfstl/metrics.hpp"

namespace mfstl {

/// How the intervals inside AC (or NC) are merged into one triple.
enum class CollapseMode : std::uint8_t {
    WeightedAverage,  // IFWA with equal weights
    MaxMembership,    // the interval with the largest membership
};

std::string_view to_string(CollapseMode m) noexcept;
CollapseMode collapse_mode_from_string(std::string_view s);

/// Intuitionistic fuzzy weighted average: (1 - prod (1-mu)^w, prod gamma^w).
IntuitionisticValue ifwa(std::span<const IntuitionisticValue> values, std::span<const double> weights);

/// Intuitionistic fuzzy weighted geometric: (prod mu^w, 1 - prod (1-gamma)^w).
IntuitionisticValue ifwg(std::span<const IntuitionisticValue> values, std::span<const double> weights);

inline double score(const IntuitionisticValue& v) noexcept { return v.mu - v.gamma; }
inline double precision(const IntuitionisticValue& v) noexcept { return v.mu + v.gamma; }

/// -1, 0, +1 as a ranks below, equal to, or above b (score first, then
/// precision).
int compare(const IntuitionisticValue& a, const IntuitionisticValue& b) noexcept;

using BMatrix = std::vector<std::vector<IntuitionisticValue>>;

/// Row i holds the triples of observation[i] against every interval of
/// models[i].
BMatrix build_b_matrix(std::span<const double> observation, std::span<const CharacteristicModel> models);

struct StatePair {
    IntuitionisticValue abnormal;  // L1
    IntuitionisticValue normal;    // L2
};

/// Merges one row of B into its abnormal (AC) and normal (NC) triples.
StatePair collapse_to_states(std::span<const IntuitionisticValue> row, const CharacteristicModel& model,
                             CollapseMode mode = CollapseMode::WeightedAverage);

/// One model per characteristic column of the training series.
std::vector<CharacteristicModel> train_models(std::span<const CharacteristicVector> series,
                                              std::span<const Label> labels, const IfsParams& params);

struct EnsembleModel {
    std::vector<CharacteristicModel> models;  // one per characteristic
    std::vector<std::size_t> selected;
    std::vector<double> weights;              // aligned with `selected`
    double tau_threshold = 0.5;
    CollapseMode collapse = CollapseMode::WeightedAverage;
    bool degenerate = false;                  // every selected tau was 0
};

/// Selects characteristics with tau >= tau_c (top three by tau when none
/// qualify) and weights them by tau. Degenerate models are never selected.
EnsembleModel select_and_weight(std::vector<CharacteristicModel> models, double tau_c,
                                CollapseMode collapse = CollapseMode::WeightedAverage);

struct StateDecision {
    IntuitionisticValue abnormal;
    IntuitionisticValue normal;
    double score_abnormal = 0.0;
    double score_normal = 0.0;
    double precision_abnormal = 0.0;
    double precision_normal = 0.0;
    Label verdict = Label::Normal;
};

/// Fuses the selected characteristics of one observation. An exact tie
/// between the two states resolves to normal.
StateDecision ifse_ad_classify(std::span<const double> observation, const EnsembleModel& em);
StateDecision ifse_ad_classify(const CharacteristicVector& observation, const EnsembleModel& em);

/// Two-sided Gaussian threshold detector fitted on normal training samples.
struct GaussianBaseline {
    double mean = 0.0;
    double stddev = 0.0;
    double lambda = 0.0;  // standard-normal quantile at 1 - epsilon/2

    static GaussianBaseline fit(std::span<const double> series, std::span<const Label> labels,
                                double epsilon = 0.1);
    Label detect(double x) const noexcept;
};

/// fit + detect in one call.
Label gaussian_dist_detect(std::span<const double> series, std::span<const Label> labels, double x,
                           double epsilon = 0.1);

}  // namespace mfstl
