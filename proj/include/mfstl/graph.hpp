#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <string_view>
#include <vector>

#include "mfstl/flow.hpp"
#include "mfstl/similarity.hpp"

namespace mfstl {

enum class EdgeMode : std::uint8_t {
    Unweighted,  // UWE: an interaction is recorded once per ordered node pair
    Weighted,    // WE: edge weight counts interactions
};

std::string_view to_string(EdgeMode m) noexcept;
EdgeMode edge_mode_from_string(std::string_view s);

struct BuildParams {
    double window = 0.1;       // temporal locality window, seconds
    double threshold = 0.65;   // critical similarity
    NodeMode node_mode = NodeMode::FiveTuple;
    EdgeMode edge_mode = EdgeMode::Weighted;
    std::optional<std::set<std::uint8_t>> protocols = std::set<std::uint8_t>{6, 17};

    void validate() const;
    bool admits(const FlowRecord& r) const noexcept {
        return !protocols || protocols->count(r.pr) != 0;
    }
};

struct Edge {
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    std::uint32_t weight = 1;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed weighted interaction graph of one sample. Node ids follow first
/// appearance; edges are sorted by (src, dst) with no self-loops.
struct MfstlGraph {
    std::size_t sample_index = 0;
    NodeMode node_mode = NodeMode::FiveTuple;
    std::vector<FlowKey> nodes;
    std::vector<Edge> edges;

    std::size_t node_count() const noexcept { return nodes.size(); }
    std::size_t edge_count() const noexcept { return edges.size(); }
};

MfstlGraph build_mfstl(const SamplePartition& p, const BuildParams& params,
                       const SimilarityWeights& w, const ServicePortMap& map);

/// Undirected simple graph as sorted adjacency lists.
struct UndirectedGraph {
    std::vector<std::vector<std::uint32_t>> adjacency;
    /// Merged weight per edge {u, v}, u < v, aligned with `edges()`.
    std::vector<std::uint64_t> weights;

    std::size_t node_count() const noexcept { return adjacency.size(); }
    std::size_t edge_count() const noexcept { return weights.size(); }
    std::size_t degree(std::uint32_t v) const noexcept { return adjacency[v].size(); }
    /// Edges {u, v} with u < v in lexicographic order.
    std::vector<std::array<std::uint32_t, 2>> edges() const;

    static UndirectedGraph from_edges(std::size_t n,
                                      const std::vector<std::array<std::uint32_t, 2>>& edges);
};

UndirectedGraph undirected_projection(const MfstlGraph& g);

/// `src_key<TAB>dst_key<TAB>weight` per edge; the sidecar lists one node
/// key per line so isolated nodes survive the export.
void export_edge_list(const MfstlGraph& g, std::ostream& edges_out, std::ostream& nodes_out);

/// Component similarities of in-window record pairs across `samples`, the
/// population for the entropy weight method. When the population exceeds
/// `cap`, every k-th pair is kept with k = ceil(total / cap).
std::vector<std::array<double, 4>> window_pair_similarities(
    const std::vector<SamplePartition>& samples, const BuildParams& params,
    const ServicePortMap& map, std::size_t cap = 100000);

}  // namespace mfstl
