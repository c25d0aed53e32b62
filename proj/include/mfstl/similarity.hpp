#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "mfstl/flow.hpp"

namespace mfstl {

/// Maps ports to service identifiers. Unmapped ports are their own service,
/// so equal ports always match.
class ServicePortMap {
public:
    /// Empty map: every port is its own service.
    ServicePortMap();

    /// Well-known IANA assignments plus the services named for flow profiling
    /// (FTP, SSH, TELNET, SMTP, DNS, HTTP, BitTorrent 6881-6889, Sasser 5554).
    static ServicePortMap defaults();

    /// Lines of `port_or_range,service_name`; `#` starts a comment.
    static ServicePortMap parse(std::istream& in);
    static ServicePortMap load(const std::string& path);

    /// Assigns [first, last] to `service`. Throws if the range overlaps an
    /// existing assignment.
    void assign(std::uint16_t first, std::uint16_t last, const std::string& service);

    std::uint32_t service_of(std::uint16_t port) const noexcept { return table_[port]; }
    bool same_service(std::uint16_t a, std::uint16_t b) const noexcept {
        return table_[a] == table_[b];
    }

private:
    std::vector<std::uint32_t> table_;  // 65536 entries
    std::vector<std::string> names_;    // id - 65536 -> name
};

struct SimilarityWeights {
    double address = 0.25;
    double port = 0.25;
    double protocol = 0.25;
    double payload = 0.25;

    static SimilarityWeights uniform() { return {}; }
    std::array<double, 4> as_array() const { return {address, port, protocol, payload}; }
    static SimilarityWeights from_array(const std::array<double, 4>& a);
    /// Throws unless every weight is in [0,1] and they sum to 1 within 1e-9.
    void validate() const;
};

/// Per-component similarities of one flow pair.
struct ComponentSimilarity {
    double address = 0.0;
    double port = 0.0;
    double protocol = 0.0;
    double payload = 0.0;

    std::array<double, 4> as_array() const { return {address, port, protocol, payload}; }
};

double ip_similarity(const FlowRecord& a, const FlowRecord& b) noexcept;
double port_similarity(const FlowRecord& a, const FlowRecord& b, const ServicePortMap& map) noexcept;
double protocol_similarity(const FlowRecord& a, const FlowRecord& b) noexcept;
double payload_similarity(const FlowRecord& a, const FlowRecord& b) noexcept;

ComponentSimilarity component_similarity(const FlowRecord& a, const FlowRecord& b,
                                         const ServicePortMap& map) noexcept;

double combined_similarity(const ComponentSimilarity& c, const SimilarityWeights& w) noexcept;
double combined_similarity(const FlowRecord& a, const FlowRecord& b, const SimilarityWeights& w,
                           const ServicePortMap& map) noexcept;

/// Entropy weight method over an n x 4 matrix of component similarities.
SimilarityWeights entropy_weights(std::span<const std::array<double, 4>> rows);

}  // namespace mfstl
