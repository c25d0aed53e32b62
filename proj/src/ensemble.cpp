#include "mfstl/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "mfstl/parallel.hpp"

namespace mfstl {

std::string_view to_string(CollapseMode m) noexcept {
    return m == CollapseMode::MaxMembership ? "max-membership" : "ifwa";
}

CollapseMode collapse_mode_from_string(std::string_view s) {
    if (s == "ifwa") return CollapseMode::WeightedAverage;
    if (s == "max-membership") return CollapseMode::MaxMembership;
    throw std::invalid_argument("unknown collapse mode '" + std::string(s) + "'");
}

namespace {

void check_weights(std::size_t n, std::span<const double> weights) {
    if (weights.size() != n) throw std::invalid_argument("weight/triple count mismatch");
    if (n == 0) throw std::invalid_argument("nothing to aggregate");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("aggregation weight outside [0,1]");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("aggregation weights must sum to 1");
}

}  // namespace

IntuitionisticValue ifwa(std::span<const IntuitionisticValue> values, std::span<const double> weights) {
    check_weights(values.size(), weights);
    double keep = 1.0, gamma = 1.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        keep *= std::pow(1.0 - values[j].mu, weights[j]);
        gamma *= std::pow(values[j].gamma, weights[j]);
    }
    return IntuitionisticValue::from(1.0 - keep, gamma);
}

IntuitionisticValue ifwg(std::span<const IntuitionisticValue> values, std::span<const double> weights) {
    check_weights(values.size(), weights);
    double mu = 1.0, keep = 1.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        mu *= std::pow(values[j].mu, weights[j]);
        keep *= std::pow(1.0 - values[j].gamma, weights[j]);
    }
    return IntuitionisticValue::from(mu, 1.0 - keep);
}

int compare(const IntuitionisticValue& a, const IntuitionisticValue& b) noexcept {
    const double sa = score(a), sb = score(b);
    if (sa != sb) return sa < sb ? -1 : 1;
    const double ha = precision(a), hb = precision(b);
    if (ha != hb) return ha < hb ? -1 : 1;
    return 0;
}

BMatrix build_b_matrix(std::span<const double> observation, std::span<const CharacteristicModel> models) {
    if (observation.size() != models.size())
        throw std::invalid_argument("observation/model count mismatch");
    BMatrix b;
    b.reserve(models.size());
    for (std::size_t i = 0; i < models.size(); ++i) b.push_back(ifs_of_value(observation[i], models[i]));
    return b;
}

namespace {

IntuitionisticValue collapse_set(std::span<const IntuitionisticValue> row,
                                 const std::vector<std::size_t>& set, CollapseMode mode) {
    if (set.empty()) throw std::invalid_argument("empty interval set");
    if (mode == CollapseMode::MaxMembership) {
        std::size_t best = set.front();
        for (auto i : set)
            if (row[i].mu > row[best].mu) best = i;
        return row[best];
    }
    std::vector<IntuitionisticValue> picked;
    picked.reserve(set.size());
    for (auto i : set) picked.push_back(row[i]);
    const std::vector<double> w(set.size(), 1.0 / static_cast<double>(set.size()));
    return ifwa(picked, w);
}

}  // namespace

StatePair collapse_to_states(std::span<const IntuitionisticValue> row, const CharacteristicModel& model,
                             CollapseMode mode) {
    if (row.size() != model.interval_count()) throw std::invalid_argument("row/interval count mismatch");
    return {collapse_set(row, model.abnormal_set, mode), collapse_set(row, model.normal_set, mode)};
}

std::vector<CharacteristicModel> train_models(std::span<const CharacteristicVector> series,
                                              std::span<const Label> labels, const IfsParams& params) {
    if (series.size() != labels.size()) throw std::invalid_argument("series/labels length mismatch");
    std::vector<CharacteristicModel> models(kCharacteristicCount);
    parallel_for(kCharacteristicCount, [&](std::size_t c) {
        std::vector<double> column(series.size());
        for (std::size_t i = 0; i < series.size(); ++i) column[i] = series[i][c];
        models[c] = train_characteristic(column, labels, params);
    });
    return models;
}

EnsembleModel select_and_weight(std::vector<CharacteristicModel> models, double tau_c, CollapseMode collapse) {
    if (models.empty()) throw std::invalid_argument("no characteristic models");
    EnsembleModel em;
    em.tau_threshold = tau_c;
    em.collapse = collapse;

    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < models.size(); ++i)
        if (!models[i].degenerate && !models[i].abnormal_set.empty() && !models[i].normal_set.empty())
            usable.push_back(i);
    if (usable.empty()) throw std::invalid_argument("no characteristic separates the training states");

    for (auto i : usable)
        if (models[i].tau >= tau_c) em.selected.push_back(i);
    if (em.selected.empty()) {
        auto ranked = usable;
        std::stable_sort(ranked.begin(), ranked.end(),
                         [&](std::size_t a, std::size_t b) { return models[a].tau > models[b].tau; });
        ranked.resize(std::min<std::size_t>(3, ranked.size()));
        std::sort(ranked.begin(), ranked.end());
        em.selected = std::move(ranked);
    }

    double total = 0.0;
    for (auto i : em.selected) total += models[i].tau;
    for (auto i : em.selected)
        em.weights.push_back(total > 0.0 ? models[i].tau / total : 1.0 / static_cast<double>(em.selected.size()));
    em.degenerate = total <= 0.0;
    em.models = std::move(models);
    return em;
}

StateDecision ifse_ad_classify(std::span<const double> observation, const EnsembleModel& em) {
    if (observation.size() != em.models.size())
        throw std::invalid_argument("observation/model count mismatch");
    std::vector<IntuitionisticValue> abnormal, normal;
    abnormal.reserve(em.selected.size());
    normal.reserve(em.selected.size());
    for (auto i : em.selected) {
        const auto row = ifs_of_value(observation[i], em.models[i]);
        const auto states = collapse_to_states(row, em.models[i], em.collapse);
        abnormal.push_back(states.abnormal);
        normal.push_back(states.normal);
    }
    StateDecision d;
    d.abnormal = ifwg(abnormal, em.weights);
    d.normal = ifwg(normal, em.weights);
    d.score_abnormal = score(d.abnormal);
    d.score_normal = score(d.normal);
    d.precision_abnormal = precision(d.abnormal);
    d.precision_normal = precision(d.normal);
    d.verdict = compare(d.abnormal, d.normal) > 0 ? Label::Abnormal : Label::Normal;
    return d;
}

StateDecision ifse_ad_classify(const CharacteristicVector& observation, const EnsembleModel& em) {
    return ifse_ad_classify(std::span<const double>(observation.values), em);
}

GaussianBaseline GaussianBaseline::fit(std::span<const double> series, std::span<const Label> labels,
                                       double epsilon) {
    if (series.size() != labels.size()) throw std::invalid_argument("series/labels length mismatch");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must be in (0,1)");
    std::vector<double> normal;
    for (std::size_t i = 0; i < series.size(); ++i)
        if (labels[i] == Label::Normal) normal.push_back(series[i]);
    if (normal.size() < 2) throw std::invalid_argument("need at least 2 normal training samples");

    GaussianBaseline g;
    const double n = static_cast<double>(normal.size());
    g.mean = std::accumulate(normal.begin(), normal.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : normal) ss += (x - g.mean) * (x - g.mean);
    g.stddev = std::sqrt(ss / (n - 1.0));
    g.lambda = boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - epsilon / 2.0);
    return g;
}

Label GaussianBaseline::detect(double x) const noexcept {
    if (stddev <= 0.0) return x != mean ? Label::Abnormal : Label::Normal;
    const double half = lambda * stddev;
    return (x < mean - half || x > mean + half) ? Label::Abnormal : Label::Normal;
}

Label gaussian_dist_detect(std::span<const double> series, std::span<const Label> labels, double x,
                           double epsilon) {
    return GaussianBaseline::fit(series, labels, epsilon).detect(x);
}

}  // namespace mfstl
