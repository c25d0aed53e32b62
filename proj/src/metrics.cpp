#include "mfstl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "mfstl/parallel.hpp"

namespace mfstl {

std::string_view to_string(Characteristic c) noexcept {
    return kCharacteristicNames[static_cast<std::size_t>(c)];
}

std::vector<std::size_t> core_numbers(const UndirectedGraph& g, std::vector<std::uint32_t>* order) {
    const std::size_t n = g.node_count();
    std::vector<std::size_t> deg(n);
    std::size_t max_deg = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
        deg[v] = g.degree(v);
        max_deg = std::max(max_deg, deg[v]);
    }
    // Bucket sort by degree, then peel in order of current degree.
    std::vector<std::size_t> bin(max_deg + 1, 0);
    for (auto d : deg) ++bin[d];
    std::size_t start = 0;
    for (auto& b : bin) {
        const auto count = b;
        b = start;
        start += count;
    }
    std::vector<std::uint32_t> vert(n);
    std::vector<std::size_t> pos(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        pos[v] = bin[deg[v]]++;
        vert[pos[v]] = v;
    }
    for (std::size_t d = max_deg; d > 0; --d) bin[d] = bin[d - 1];
    if (!bin.empty()) bin[0] = 0;

    for (std::size_t i = 0; i < n; ++i) {
        const auto v = vert[i];
        for (auto u : g.adjacency[v]) {
            if (deg[u] > deg[v]) {
                const auto du = deg[u];
                const auto pu = pos[u];
                const auto pw = bin[du];
                const auto w = vert[pw];
                if (u != w) {
                    pos[u] = pw;
                    vert[pu] = w;
                    pos[w] = pu;
                    vert[pw] = u;
                }
                ++bin[du];
                --deg[u];
            }
        }
    }
    if (order) *order = vert;
    return deg;
}

namespace {

// Branch and bound over a small candidate set with a greedy colouring bound.
class CliqueSearch {
public:
    CliqueSearch(std::size_t n, std::vector<char> adj, std::size_t& best)
        : n_(n), adj_(std::move(adj)), best_(best) {}

    void run(std::size_t base) {
        std::vector<std::uint32_t> p(n_);
        std::iota(p.begin(), p.end(), 0u);
        expand(base, p);
    }

private:
    bool connected(std::uint32_t a, std::uint32_t b) const { return adj_[a * n_ + b] != 0; }

    void colour(const std::vector<std::uint32_t>& p, std::vector<std::uint32_t>& order,
                std::vector<std::size_t>& colours) const {
        std::vector<std::vector<std::uint32_t>> classes;
        for (auto v : p) {
            std::size_t k = 0;
            for (; k < classes.size(); ++k) {
                bool clash = false;
                for (auto u : classes[k])
                    if (connected(u, v)) {
                        clash = true;
                        break;
                    }
                if (!clash) break;
            }
            if (k == classes.size()) classes.emplace_back();
            classes[k].push_back(v);
        }
        order.clear();
        colours.clear();
        for (std::size_t k = 0; k < classes.size(); ++k)
            for (auto v : classes[k]) {
                order.push_back(v);
                colours.push_back(k + 1);
            }
    }

    void expand(std::size_t size, std::vector<std::uint32_t> p) {
        std::vector<std::uint32_t> order;
        std::vector<std::size_t> colours;
        colour(p, order, colours);
        for (std::size_t i = order.size(); i-- > 0;) {
            if (size + colours[i] <= best_) return;
            const auto v = order[i];
            std::vector<std::uint32_t> next;
            for (std::size_t j = 0; j < i; ++j)
                if (connected(v, order[j])) next.push_back(order[j]);
            if (next.empty())
                best_ = std::max(best_, size + 1);
            else
                expand(size + 1, std::move(next));
        }
    }

    std::size_t n_;
    std::vector<char> adj_;
    std::size_t& best_;
};

}  // namespace

std::size_t max_clique_size(const UndirectedGraph& g) {
    const std::size_t n = g.node_count();
    if (n == 0) return 0;
    if (g.edge_count() == 0) return 1;

    std::vector<std::uint32_t> order;
    const auto core = core_numbers(g, &order);
    std::vector<std::size_t> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[order[i]] = i;

    std::size_t best = 2;
    // Roots from the densest end; each root only looks at neighbours peeled
    // after it, so the candidate set is bounded by the degeneracy.
    for (std::size_t i = n; i-- > 0;) {
        const auto v = order[i];
        if (core[v] + 1 <= best) continue;
        std::vector<std::uint32_t> cand;
        for (auto u : g.adjacency[v])
            if (rank[u] > rank[v]) cand.push_back(u);
        if (cand.size() + 1 <= best) continue;
        const std::size_t k = cand.size();
        std::vector<char> adj(k * k, 0);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b)
                if (std::binary_search(g.adjacency[cand[a]].begin(), g.adjacency[cand[a]].end(), cand[b]))
                    adj[a * k + b] = adj[b * k + a] = 1;
        CliqueSearch(k, std::move(adj), best).run(1);
    }
    return best;
}

std::vector<std::uint32_t> largest_component(const UndirectedGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<char> seen(n, 0);
    std::vector<std::uint32_t> best, current, stack;
    for (std::uint32_t s = 0; s < n; ++s) {
        if (seen[s]) continue;
        current.clear();
        stack.assign(1, s);
        seen[s] = 1;
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            current.push_back(v);
            for (auto u : g.adjacency[v])
                if (!seen[u]) {
                    seen[u] = 1;
                    stack.push_back(u);
                }
        }
        if (current.size() > best.size()) best = current;
    }
    std::sort(best.begin(), best.end());
    return best;
}

namespace {

struct PathStats {
    double spl = 0.0;
    double diameter_max = 0.0;
    double diameter_mean = 0.0;
};

PathStats path_stats(const UndirectedGraph& g) {
    const auto comp = largest_component(g);
    PathStats out;
    if (comp.size() < 2) return out;
    const std::size_t n = g.node_count();
    std::vector<std::int64_t> dist(n, -1);
    std::vector<std::uint32_t> queue;
    queue.reserve(comp.size());
    long double total = 0.0L;
    std::int64_t max_ecc = 0;
    long double ecc_sum = 0.0L;
    for (auto s : comp) {
        for (auto v : comp) dist[v] = -1;
        queue.assign(1, s);
        dist[s] = 0;
        std::int64_t ecc = 0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const auto v = queue[head];
            total += static_cast<long double>(dist[v]);
            ecc = std::max(ecc, dist[v]);
            for (auto u : g.adjacency[v])
                if (dist[u] < 0) {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
        }
        max_ecc = std::max(max_ecc, ecc);
        ecc_sum += static_cast<long double>(ecc);
    }
    const auto c = static_cast<long double>(comp.size());
    out.spl = static_cast<double>(total / (c * (c - 1.0L)));
    out.diameter_max = static_cast<double>(max_ecc);
    out.diameter_mean = static_cast<double>(ecc_sum / c);
    return out;
}

double transitivity(const UndirectedGraph& g) {
    std::uint64_t triangles = 0;
    std::uint64_t wedges = 0;
    for (std::uint32_t u = 0; u < g.node_count(); ++u) {
        const auto& nu = g.adjacency[u];
        const std::uint64_t d = nu.size();
        wedges += d * (d - (d > 0 ? 1 : 0)) / 2;
        for (auto v : nu) {
            if (v <= u) continue;
            const auto& nv = g.adjacency[v];
            // Count w > v adjacent to both.
            auto a = std::upper_bound(nu.begin(), nu.end(), v);
            auto b = std::upper_bound(nv.begin(), nv.end(), v);
            while (a != nu.end() && b != nv.end()) {
                if (*a < *b)
                    ++a;
                else if (*b < *a)
                    ++b;
                else {
                    ++triangles;
                    ++a;
                    ++b;
                }
            }
        }
    }
    if (wedges == 0) return 0.0;
    return 3.0 * static_cast<double>(triangles) / static_cast<double>(wedges);
}

double assortativity(const UndirectedGraph& g) {
    const auto edges = g.edges();
    if (edges.empty()) return 0.0;
    long double mean = 0.0L;
    for (const auto& e : edges) mean += static_cast<long double>(g.degree(e[0]) + g.degree(e[1]));
    mean /= 2.0L * static_cast<long double>(edges.size());
    long double cov = 0.0L, var = 0.0L;
    for (const auto& e : edges) {
        const long double a = static_cast<long double>(g.degree(e[0])) - mean;
        const long double b = static_cast<long double>(g.degree(e[1])) - mean;
        cov += a * b;
        var += (a * a + b * b) / 2.0L;
    }
    if (var <= 0.0L) return 0.0;
    return std::clamp(static_cast<double>(cov / var), -1.0, 1.0);
}

}  // namespace

CharacteristicVector characteristics(const UndirectedGraph& g, const MetricOptions& opts) {
    CharacteristicVector c;
    const std::size_t n = g.node_count();
    if (n == 0) return c;
    const std::size_t m = g.edge_count();

    std::map<std::size_t, std::size_t> degree_counts;
    std::size_t max_deg = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
        ++degree_counts[g.degree(v)];
        max_deg = std::max(max_deg, g.degree(v));
    }

    c[Characteristic::NodeNumber] = static_cast<double>(n);
    c[Characteristic::EdgeNumber] = static_cast<double>(m);
    c[Characteristic::MeanDegree] = 2.0 * static_cast<double>(m) / static_cast<double>(n);
    c[Characteristic::MaxDegree] = static_cast<double>(max_deg);
    if (opts.mdr == MdrDenominator::NodesMinusOne)
        c[Characteristic::Mdr] = n > 1 ? static_cast<double>(max_deg) / static_cast<double>(n - 1) : 0.0;
    else
        c[Characteristic::Mdr] = m > 0 ? static_cast<double>(max_deg) / (2.0 * static_cast<double>(m)) : 0.0;

    const auto core = core_numbers(g);
    c[Characteristic::KCore] = static_cast<double>(*std::max_element(core.begin(), core.end()));
    c[Characteristic::Clique] = static_cast<double>(max_clique_size(g));
    c[Characteristic::Clustering] = transitivity(g);
    c[Characteristic::Assortative] = assortativity(g);

    double h = 0.0;
    for (const auto& [deg, count] : degree_counts) {
        const double p = static_cast<double>(count) / static_cast<double>(n);
        h -= p * std::log(p);
    }
    c[Characteristic::Entropy] = h;

    const auto paths = path_stats(g);
    c[Characteristic::Spl] = paths.spl;
    c[Characteristic::DiameterMax] = paths.diameter_max;
    c[Characteristic::DiameterMean] = paths.diameter_mean;

    std::vector<double> xs, ys;
    for (const auto& [deg, count] : degree_counts) {
        if (deg == 0) continue;
        xs.push_back(std::log(static_cast<double>(deg)));
        ys.push_back(std::log(static_cast<double>(count)));
    }
    if (xs.size() >= 2) {
        const double xbar = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
        const double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - xbar) * (ys[i] - ybar);
            sxx += (xs[i] - xbar) * (xs[i] - xbar);
        }
        c[Characteristic::PowerLaw] = sxy / sxx;
    }
    return c;
}

CharacteristicVector characteristics(const MfstlGraph& g, const MetricOptions& opts) {
    return characteristics(undirected_projection(g), opts);
}

std::vector<CharacteristicVector> characteristic_series(const std::vector<SamplePartition>& samples,
                                                        const BuildParams& params,
                                                        const SimilarityWeights& w,
                                                        const ServicePortMap& map,
                                                        const MetricOptions& opts) {
    std::vector<CharacteristicVector> out(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
        out[i] = characteristics(build_mfstl(samples[i], params, w, map), opts);
    });
    return out;
}

}  // namespace mfstl
