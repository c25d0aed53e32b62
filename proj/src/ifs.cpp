#include "mfstl/ifs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mfstl {

IntuitionisticValue IntuitionisticValue::from(double mu, double gamma) noexcept {
    IntuitionisticValue v;
    v.mu = std::clamp(mu, 0.0, 1.0);
    v.gamma = std::clamp(gamma, 0.0, 1.0);
    if (v.mu + v.gamma > 1.0) v.gamma = 1.0 - v.mu;
    while (v.mu + v.gamma > 1.0) v.gamma = std::nextafter(v.gamma, 0.0);
    v.pi = std::max(0.0, (1.0 - v.mu) - v.gamma);
    return v;
}

bool IntuitionisticValue::valid() const noexcept {
    return mu >= 0.0 && mu <= 1.0 && gamma >= 0.0 && gamma <= 1.0 && mu + gamma <= 1.0 &&
           pi >= 0.0 && pi <= 1.0 && std::abs(pi - (1.0 - mu - gamma)) <= 1e-12;
}

namespace {

std::size_t count_distinct(std::vector<double> sorted) {
    return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

// Linear-interpolation empirical quantile of a sorted sample.
double quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> initial_centers(const std::vector<double>& sorted, std::size_t m) {
    auto at_quantiles = [m](const std::vector<double>& s) {
        std::vector<double> c(m);
        for (std::size_t k = 0; k < m; ++k)
            c[k] = quantile(s, (static_cast<double>(k) + 0.5) / static_cast<double>(m));
        return c;
    };
    auto c = at_quantiles(sorted);
    if (std::adjacent_find(c.begin(), c.end()) == c.end()) return c;
    // Heavy ties would start clusters on top of each other, and coincident
    // centers never separate; seed from the distinct values instead.
    std::vector<double> distinct = sorted;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    return at_quantiles(distinct);
}

}  // namespace

std::vector<double> fcm_centers(std::span<const double> values, std::size_t m, const FcmOptions& opts) {
    if (m < 2) throw std::invalid_argument("interval count must be at least 2");
    if (!(opts.fuzzifier > 1.0)) throw std::invalid_argument("fuzzifier must exceed 1");
    std::vector<double> sorted(values.begin(), values.end());
    for (double x : sorted)
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite training value");
    std::sort(sorted.begin(), sorted.end());
    if (count_distinct(sorted) < m) throw std::invalid_argument("insufficient distinct values");

    auto centers = initial_centers(sorted, m);
    const double range = sorted.back() - sorted.front();
    const double tol = opts.tolerance * range;
    const double exponent = 2.0 / (opts.fuzzifier - 1.0);

    std::vector<double> u(m), num(m), den(m);
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        std::fill(num.begin(), num.end(), 0.0);
        std::fill(den.begin(), den.end(), 0.0);
        for (double x : values) {
            std::size_t zero_hits = 0;
            for (std::size_t k = 0; k < m; ++k)
                if (x == centers[k]) ++zero_hits;
            if (zero_hits > 0) {
                for (std::size_t k = 0; k < m; ++k)
                    u[k] = x == centers[k] ? 1.0 / static_cast<double>(zero_hits) : 0.0;
            } else {
                for (std::size_t k = 0; k < m; ++k) {
                    const double dk = std::abs(x - centers[k]);
                    double s = 0.0;
                    for (std::size_t j = 0; j < m; ++j) s += std::pow(dk / std::abs(x - centers[j]), exponent);
                    u[k] = 1.0 / s;
                }
            }
            for (std::size_t k = 0; k < m; ++k) {
                const double w = std::pow(u[k], opts.fuzzifier);
                num[k] += w * x;
                den[k] += w;
            }
        }
        double moved = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double next = den[k] > 0.0 ? num[k] / den[k] : centers[k];
            moved = std::max(moved, std::abs(next - centers[k]));
            centers[k] = next;
        }
        if (moved <= tol) break;
    }
    std::sort(centers.begin(), centers.end());
    return centers;
}

std::vector<double> partition_domain(std::span<const double> values, std::span<const double> centers,
                                     double margin_low, double margin_high) {
    if (values.empty()) throw std::invalid_argument("empty training series");
    if (centers.empty()) throw std::invalid_argument("no centers");
    if (!std::is_sorted(centers.begin(), centers.end()))
        throw std::invalid_argument("centers must be sorted");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    std::vector<double> d(centers.size() + 1);
    d.front() = *lo - margin_low;
    d.back() = *hi + margin_high;
    for (std::size_t i = 1; i < centers.size(); ++i) d[i] = (centers[i - 1] + centers[i]) / 2.0;
    return d;
}

double nonmembership(double mu, double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("Yager exponent must be in (0,1]");
    mu = std::clamp(mu, 0.0, 1.0);
    if (mu >= 1.0) return 0.0;
    if (mu <= 0.0) return 1.0;
    return std::pow(1.0 - std::pow(mu, beta), 1.0 / beta);
}

DistinctionResult distinction_partition(std::span<const Tally> tallies) {
    const std::size_t m = tallies.size();
    if (m < 2) throw std::invalid_argument("need at least two intervals");
    if (m > 24) throw std::invalid_argument("too many intervals for exhaustive search");
    std::uint64_t abnormal = 0, normal = 0;
    std::size_t populated = 0;
    for (const auto& t : tallies) {
        abnormal += t.abnormal;
        normal += t.normal;
        if (t.total() > 0) ++populated;
    }
    if (abnormal + normal == 0) throw std::invalid_argument("no training instances");

    DistinctionResult out;
    out.degenerate = abnormal == 0 || normal == 0;
    if (populated < 2) {
        // Every instance sits in one interval: nothing to separate. That
        // interval goes to AC only if abnormal instances dominate it.
        out.degenerate = true;
        std::size_t hot = 0;
        while (tallies[hot].total() == 0) ++hot;
        const std::size_t ac = tallies[hot].abnormal > tallies[hot].normal ? hot : (hot == 0 ? 1 : 0);
        for (std::size_t i = 0; i < m; ++i) (i == ac ? out.abnormal_set : out.normal_set).push_back(i);
        return out;
    }

    const std::uint64_t full = (std::uint64_t{1} << m) - 1;
    std::uint64_t best_mask = 0;
    double best_eta = -std::numeric_limits<double>::infinity();
    double best_tau = 0.0;
    auto lex_less = [](std::uint64_t a, std::uint64_t b) {
        // Ascending index lists of equal length: the first differing position
        // decides, i.e. the lowest bit where the masks differ.
        const std::uint64_t diff = a ^ b;
        const std::uint64_t low = diff & (~diff + 1);
        return (a & low) != 0;
    };
    for (std::uint64_t mask = 1; mask < full; ++mask) {
        std::uint64_t a_ac = 0, n_ac = 0, a_nc = 0, n_nc = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (mask >> i & 1) {
                a_ac += tallies[i].abnormal;
                n_ac += tallies[i].normal;
            } else {
                a_nc += tallies[i].abnormal;
                n_nc += tallies[i].normal;
            }
        }
        if (a_ac + n_ac == 0 || a_nc + n_nc == 0) continue;
        const double t_ac = static_cast<double>(a_ac + n_ac);
        const double t_nc = static_cast<double>(a_nc + n_nc);
        const double tt = static_cast<double>(a_ac) / t_ac;
        const double tf = static_cast<double>(n_ac) / t_ac;
        const double ff = static_cast<double>(n_nc) / t_nc;
        const double ft = static_cast<double>(a_nc) / t_nc;
        const double eta = tt - tf + ff - ft;
        bool take = false;
        if (eta > best_eta + 1e-12) {
            take = true;
        } else if (std::abs(eta - best_eta) <= 1e-12) {
            const int pc = std::popcount(mask), best_pc = std::popcount(best_mask);
            take = pc < best_pc || (pc == best_pc && lex_less(mask, best_mask));
        }
        if (take) {
            best_mask = mask;
            best_eta = eta;
            best_tau = eta / (tt + tf + ff + ft);
        }
    }
    out.eta = best_eta;
    out.tau = std::clamp(best_tau, 0.0, 1.0);
    for (std::size_t i = 0; i < m; ++i) (best_mask >> i & 1 ? out.abnormal_set : out.normal_set).push_back(i);
    if (out.degenerate) out.tau = 0.0;
    return out;
}

void IfsParams::validate() const {
    if (intervals < 2) throw std::invalid_argument("interval count must be at least 2");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in [0,1)");
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must be in (0,1]");
    if (!(margin_fraction > 0.0)) throw std::invalid_argument("margin fraction must be positive");
}

bool CharacteristicModel::in_abnormal_set(std::size_t interval) const noexcept {
    return std::binary_search(abnormal_set.begin(), abnormal_set.end(), interval);
}

double CharacteristicModel::variance(std::size_t i) const {
    if (centers.size() < 2) return 0.0;
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in [0,1)");
    const double delta = i == 0 ? centers[1] - centers[0] : centers[i] - centers[i - 1];
    return -(delta * delta) / (8.0 * std::log((1.0 - alpha) / 2.0));
}

double CharacteristicModel::membership(double x, std::size_t i) const {
    const double var = variance(i);
    const double dx = x - centers.at(i);
    if (var <= 0.0) return dx == 0.0 ? 1.0 : 0.0;
    return std::exp(-(dx * dx) / (2.0 * var));
}

std::size_t CharacteristicModel::interval_of(double x) const noexcept {
    if (bounds.size() < 3) return 0;
    const auto first = bounds.begin() + 1;
    const auto last = bounds.end() - 1;
    return static_cast<std::size_t>(std::lower_bound(first, last, x) - first);
}

CharacteristicModel train_characteristic(std::span<const double> values, std::span<const Label> labels,
                                         const IfsParams& params) {
    params.validate();
    if (values.size() != labels.size()) throw std::invalid_argument("values/labels length mismatch");
    if (values.empty()) throw std::invalid_argument("empty training series");

    CharacteristicModel model;
    model.alpha = params.alpha;
    model.beta = params.beta;

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t distinct = count_distinct(sorted);
    const std::size_t m = std::min(params.intervals, distinct);
    const double range = sorted.back() - sorted.front();
    model.margin_low = model.margin_high = params.margin_fraction * range;

    if (m < 2) {
        model.centers = {sorted.front()};
        model.bounds = {sorted.front(), sorted.back()};
        model.tallies.assign(1, Tally{});
        for (auto l : labels) (l == Label::Abnormal ? model.tallies[0].abnormal : model.tallies[0].normal)++;
        model.normal_set = {0};
        model.degenerate = true;
        return model;
    }

    model.centers = fcm_centers(values, m, params.fcm);
    model.bounds = partition_domain(values, model.centers, model.margin_low, model.margin_high);
    model.tallies.assign(m, Tally{});
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto& t = model.tallies[model.interval_of(values[i])];
        (labels[i] == Label::Abnormal ? t.abnormal : t.normal)++;
    }
    auto split = distinction_partition(model.tallies);
    model.abnormal_set = std::move(split.abnormal_set);
    model.normal_set = std::move(split.normal_set);
    model.tau = split.tau;
    model.degenerate = split.degenerate;
    return model;
}

std::vector<IntuitionisticValue> ifs_of_value(double x, const CharacteristicModel& model) {
    std::vector<IntuitionisticValue> out;
    out.reserve(model.interval_count());
    for (std::size_t i = 0; i < model.interval_count(); ++i) {
        const double mu = model.membership(x, i);
        out.push_back(IntuitionisticValue::from(mu, nonmembership(mu, model.beta)));
    }
    return out;
}

std::size_t best_interval(double x, const CharacteristicModel& model) {
    std::size_t best = 0;
    double best_mu = -1.0;
    for (std::size_t i = 0; i < model.interval_count(); ++i) {
        const double mu = model.membership(x, i);
        if (mu > best_mu ||
            (mu == best_mu && std::abs(x - model.centers[i]) < std::abs(x - model.centers[best]))) {
            best = i;
            best_mu = mu;
        }
    }
    return best;
}

Label ifs_ad_classify(double x, const CharacteristicModel& model) {
    if (model.degenerate || model.abnormal_set.empty()) return Label::Normal;
    return model.in_abnormal_set(best_interval(x, model)) ? Label::Abnormal : Label::Normal;
}

}  // namespace mfstl
