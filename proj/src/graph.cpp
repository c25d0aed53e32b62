#include "mfstl/graph.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace mfstl {

std::string_view to_string(EdgeMode m) noexcept {
    return m == EdgeMode::Unweighted ? "UWE" : "WE";
}

EdgeMode edge_mode_from_string(std::string_view s) {
    if (s == "WE" || s == "we" || s == "weighted") return EdgeMode::Weighted;
    if (s == "UWE" || s == "uwe" || s == "unweighted") return EdgeMode::Unweighted;
    throw std::invalid_argument("unknown edge mode '" + std::string(s) + "'");
}

void BuildParams::validate() const {
    if (!(window > 0.0)) throw std::invalid_argument("temporal locality window must be positive");
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw std::invalid_argument("critical similarity must be in [0,1]");
}

namespace {

// Admitted records of a partition, keeping their order.
std::vector<const FlowRecord*> admitted(const SamplePartition& p, const BuildParams& params) {
    std::vector<const FlowRecord*> out;
    out.reserve(p.records.size());
    for (const auto& r : p.records)
        if (params.admits(r)) out.push_back(&r);
    return out;
}

}  // namespace

MfstlGraph build_mfstl(const SamplePartition& p, const BuildParams& params,
                       const SimilarityWeights& w, const ServicePortMap& map) {
    params.validate();
    MfstlGraph g;
    g.sample_index = p.index;
    g.node_mode = params.node_mode;

    const auto recs = admitted(p, params);
    std::unordered_map<FlowKey, std::uint32_t, FlowKeyHash> ids;
    std::vector<std::uint32_t> node_of(recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto key = FlowKey::of(*recs[i], params.node_mode);
        auto [it, inserted] = ids.try_emplace(key, static_cast<std::uint32_t>(g.nodes.size()));
        if (inserted) g.nodes.push_back(key);
        node_of[i] = it->second;
    }

    const Micros window = seconds_to_micros(params.window);
    std::unordered_map<std::uint64_t, std::uint32_t> weight;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const Micros horizon = recs[i]->ts + window;
        for (std::size_t j = i + 1; j < recs.size() && recs[j]->ts <= horizon; ++j) {
            if (node_of[i] == node_of[j]) continue;
            if (combined_similarity(*recs[i], *recs[j], w, map) < params.threshold) continue;
            const auto key = (std::uint64_t{node_of[i]} << 32) | node_of[j];
            auto& c = weight[key];
            if (params.edge_mode == EdgeMode::Weighted || c == 0) ++c;
        }
    }

    g.edges.reserve(weight.size());
    for (const auto& [key, c] : weight)
        g.edges.push_back({static_cast<std::uint32_t>(key >> 32), static_cast<std::uint32_t>(key), c});
    std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    return g;
}

std::vector<std::array<std::uint32_t, 2>> UndirectedGraph::edges() const {
    std::vector<std::array<std::uint32_t, 2>> out;
    out.reserve(weights.size());
    for (std::uint32_t u = 0; u < adjacency.size(); ++u)
        for (auto v : adjacency[u])
            if (u < v) out.push_back({u, v});
    return out;
}

UndirectedGraph UndirectedGraph::from_edges(std::size_t n,
                                            const std::vector<std::array<std::uint32_t, 2>>& edges) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> merged;
    for (const auto& e : edges) {
        if (e[0] == e[1]) continue;
        if (e[0] >= n || e[1] >= n) throw std::out_of_range("edge endpoint out of range");
        ++merged[{std::min(e[0], e[1]), std::max(e[0], e[1])}];
    }
    UndirectedGraph g;
    g.adjacency.resize(n);
    g.weights.reserve(merged.size());
    for (const auto& [uv, c] : merged) {
        g.adjacency[uv.first].push_back(uv.second);
        g.adjacency[uv.second].push_back(uv.first);
        g.weights.push_back(c);
    }
    for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
    return g;
}

UndirectedGraph undirected_projection(const MfstlGraph& g) {
    // Merge u->v and v->u into {min, max}; std::map keeps the weight order
    // aligned with UndirectedGraph::edges().
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> merged;
    for (const auto& e : g.edges) merged[{std::min(e.src, e.dst), std::max(e.src, e.dst)}] += e.weight;

    UndirectedGraph u;
    u.adjacency.resize(g.nodes.size());
    u.weights.reserve(merged.size());
    for (const auto& [uv, w] : merged) {
        u.adjacency[uv.first].push_back(uv.second);
        u.adjacency[uv.second].push_back(uv.first);
        u.weights.push_back(w);
    }
    for (auto& adj : u.adjacency) std::sort(adj.begin(), adj.end());
    return u;
}

void export_edge_list(const MfstlGraph& g, std::ostream& edges_out, std::ostream& nodes_out) {
    std::vector<std::string> names;
    names.reserve(g.nodes.size());
    for (const auto& k : g.nodes) {
        names.push_back(k.to_string(g.node_mode));
        nodes_out << names.back() << '\n';
    }
    for (const auto& e : g.edges) edges_out << names[e.src] << '\t' << names[e.dst] << '\t' << e.weight << '\n';
}

std::vector<std::array<double, 4>> window_pair_similarities(
    const std::vector<SamplePartition>& samples, const BuildParams& params,
    const ServicePortMap& map, std::size_t cap) {
    params.validate();
    if (cap == 0) throw std::invalid_argument("pair cap must be positive");
    const Micros window = seconds_to_micros(params.window);

    auto for_each_pair = [&](auto&& fn) {
        for (const auto& s : samples) {
            const auto recs = admitted(s, params);
            for (std::size_t i = 0; i < recs.size(); ++i)
                for (std::size_t j = i + 1; j < recs.size() && recs[j]->ts <= recs[i]->ts + window; ++j)
                    fn(*recs[i], *recs[j]);
        }
    };

    std::size_t total = 0;
    for_each_pair([&](const FlowRecord&, const FlowRecord&) { ++total; });
    const std::size_t stride = total <= cap ? 1 : (total + cap - 1) / cap;

    std::vector<std::array<double, 4>> out;
    out.reserve(std::min(total, cap));
    std::size_t idx = 0;
    for_each_pair([&](const FlowRecord& a, const FlowRecord& b) {
        if (idx++ % stride == 0) out.push_back(component_similarity(a, b, map).as_array());
    });
    return out;
}

}  // namespace mfstl
