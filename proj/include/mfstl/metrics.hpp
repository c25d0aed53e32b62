#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "mfstl/graph.hpp"

namespace mfstl {

enum class Characteristic : std::size_t {
    NodeNumber,
    EdgeNumber,
    MeanDegree,
    MaxDegree,
    Mdr,
    KCore,
    Clique,
    Clustering,
    Assortative,
    Entropy,
    Spl,
    DiameterMax,
    DiameterMean,
    PowerLaw,
};

inline constexpr std::size_t kCharacteristicCount = 14;

inline constexpr std::array<std::string_view, kCharacteristicCount> kCharacteristicNames = {
    "node_number", "edge_number", "mean_degree", "max_degree",  "mdr",
    "kcore",       "clique",      "clustering",  "assortative", "entropy",
    "spl",         "diameter_max", "diameter_mean", "power_law",
};

std::string_view to_string(Characteristic c) noexcept;

struct CharacteristicVector {
    std::array<double, kCharacteristicCount> values{};

    double& operator[](Characteristic c) { return values[static_cast<std::size_t>(c)]; }
    double operator[](Characteristic c) const { return values[static_cast<std::size_t>(c)]; }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    friend bool operator==(const CharacteristicVector&, const CharacteristicVector&) = default;
};

enum class MdrDenominator : std::uint8_t {
    NodesMinusOne,  // max_degree / (N - 1)
    DegreeSum,      // max_degree / (2E)
};

struct MetricOptions {
    MdrDenominator mdr = MdrDenominator::NodesMinusOne;
};

/// All metrics except node count are taken on the undirected projection.
CharacteristicVector characteristics(const MfstlGraph& g, const MetricOptions& opts = {});
CharacteristicVector characteristics(const UndirectedGraph& g, const MetricOptions& opts = {});

/// One vector per sample, in sample order. Samples are processed on a
/// bounded worker pool; the result does not depend on scheduling.
std::vector<CharacteristicVector> characteristic_series(const std::vector<SamplePartition>& samples,
                                                        const BuildParams& params,
                                                        const SimilarityWeights& w,
                                                        const ServicePortMap& map,
                                                        const MetricOptions& opts = {});

// Building blocks, exposed for tests and reuse.

/// Core number per node (Batagelj-Zaversnik peeling); `order` receives the
/// peeling order when non-null.
std::vector<std::size_t> core_numbers(const UndirectedGraph& g,
                                      std::vector<std::uint32_t>* order = nullptr);

/// Size of a maximum clique (exact branch and bound).
std::size_t max_clique_size(const UndirectedGraph& g);

/// Nodes of the largest connected component; ties go to the component with
/// the smallest node id.
std::vector<std::uint32_t> largest_component(const UndirectedGraph& g);

}  // namespace mfstl
