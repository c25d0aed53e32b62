#include "mfstl/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace mfstl {

namespace {

constexpr std::uint32_t kFirstNamedService = 65536;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::uint16_t parse_port(std::string_view s, std::size_t line) {
    unsigned v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || v > 65535)
        throw ParseError(line, "port", "invalid port '" + std::string(s) + "'");
    return static_cast<std::uint16_t>(v);
}

}  // namespace

ServicePortMap::ServicePortMap() : table_(65536) {
    std::iota(table_.begin(), table_.end(), 0u);
}

void ServicePortMap::assign(std::uint16_t first, std::uint16_t last, const std::string& service) {
    if (first > last) throw std::invalid_argument("port range is reversed");
    for (std::uint32_t p = first; p <= last; ++p)
        if (table_[p] >= kFirstNamedService)
            throw std::invalid_argument("port " + std::to_string(p) + " already mapped to '" +
                                        names_[table_[p] - kFirstNamedService] + "'");
    auto it = std::find(names_.begin(), names_.end(), service);
    std::uint32_t id;
    if (it == names_.end()) {
        id = kFirstNamedService + static_cast<std::uint32_t>(names_.size());
        names_.push_back(service);
    } else {
        id = kFirstNamedService + static_cast<std::uint32_t>(it - names_.begin());
    }
    for (std::uint32_t p = first; p <= last; ++p) table_[p] = id;
}

ServicePortMap ServicePortMap::defaults() {
    ServicePortMap m;
    m.assign(20, 21, "ftp");
    m.assign(22, 22, "ssh");
    m.assign(23, 23, "telnet");
    m.assign(25, 25, "smtp");
    m.assign(53, 53, "domain");
    m.assign(67, 68, "bootp");
    m.assign(69, 69, "tftp");
    m.assign(80, 80, "http");
    m.assign(88, 88, "kerberos");
    m.assign(110, 110, "pop3");
    m.assign(119, 119, "nntp");
    m.assign(123, 123, "ntp");
    m.assign(135, 135, "epmap");
    m.assign(137, 139, "netbios");
    m.assign(143, 143, "imap");
    m.assign(161, 162, "snmp");
    m.assign(179, 179, "bgp");
    m.assign(389, 389, "ldap");
    m.assign(443, 443, "https");
    m.assign(445, 445, "microsoft-ds");
    m.assign(465, 465, "submissions");
    m.assign(514, 514, "syslog");
    m.assign(587, 587, "submission");
    m.assign(636, 636, "ldaps");
    m.assign(993, 993, "imaps");
    m.assign(995, 995, "pop3s");
    m.assign(5554, 5554, "sasser");
    m.assign(6881, 6889, "bittorrent");
    return m;
}

ServicePortMap ServicePortMap::parse(std::istream& in) {
    ServicePortMap m;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string_view::npos)
            throw ParseError(lineno, "row", "expected 'port_or_range,service_name'");
        const auto ports = trim(line.substr(0, comma));
        const auto name = trim(line.substr(comma + 1));
        if (name.empty()) throw ParseError(lineno, "service_name", "empty service name");
        std::uint16_t first, last;
        if (auto dash = ports.find('-'); dash != std::string_view::npos) {
            first = parse_port(trim(ports.substr(0, dash)), lineno);
            last = parse_port(trim(ports.substr(dash + 1)), lineno);
        } else {
            first = last = parse_port(ports, lineno);
        }
        try {
            m.assign(first, last, std::string(name));
        } catch (const std::invalid_argument& e) {
            throw ParseError(lineno, "port_or_range", e.what());
        }
    }
    return m;
}

ServicePortMap ServicePortMap::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open port map '" + path + "'");
    return parse(in);
}

SimilarityWeights SimilarityWeights::from_array(const std::array<double, 4>& a) {
    return {a[0], a[1], a[2], a[3]};
}

void SimilarityWeights::validate() const {
    double sum = 0.0;
    for (double w : as_array()) {
        if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("similarity weight outside [0,1]");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("similarity weights must sum to 1");
}

namespace {

double prefix_ratio(const IpAddress& x, const IpAddress& y) noexcept {
    if (x.v6 != y.v6) return 0.0;
    return static_cast<double>(common_prefix_bits(x, y)) / x.bit_length();
}

}  // namespace

double ip_similarity(const FlowRecord& a, const FlowRecord& b) noexcept {
    return std::max({prefix_ratio(a.sa, b.sa), prefix_ratio(a.sa, b.da), prefix_ratio(a.da, b.sa),
                     prefix_ratio(a.da, b.da)});
}

double port_similarity(const FlowRecord& a, const FlowRecord& b, const ServicePortMap& map) noexcept {
    return (map.same_service(a.sp, b.sp) || map.same_service(a.sp, b.dp) ||
            map.same_service(a.dp, b.sp) || map.same_service(a.dp, b.dp))
               ? 1.0
               : 0.0;
}

double protocol_similarity(const FlowRecord& a, const FlowRecord& b) noexcept {
    return a.pr == b.pr ? 1.0 : 0.0;
}

double payload_similarity(const FlowRecord& a, const FlowRecord& b) noexcept {
    if (a.ps == b.ps) return 1.0;  // includes both zero
    const auto lo = std::min(a.ps, b.ps);
    const auto hi = std::max(a.ps, b.ps);
    return static_cast<double>(lo) / static_cast<double>(hi);
}

ComponentSimilarity component_similarity(const FlowRecord& a, const FlowRecord& b,
                                         const ServicePortMap& map) noexcept {
    return {ip_similarity(a, b), port_similarity(a, b, map), protocol_similarity(a, b),
            payload_similarity(a, b)};
}

double combined_similarity(const ComponentSimilarity& c, const SimilarityWeights& w) noexcept {
    const double r =
        w.address * c.address + w.port * c.port + w.protocol * c.protocol + w.payload * c.payload;
    return std::clamp(r, 0.0, 1.0);
}

double combined_similarity(const FlowRecord& a, const FlowRecord& b, const SimilarityWeights& w,
                           const ServicePortMap& map) noexcept {
    return combined_similarity(component_similarity(a, b, map), w);
}

SimilarityWeights entropy_weights(std::span<const std::array<double, 4>> rows) {
    const std::size_t n = rows.size();
    if (n < 2) throw std::invalid_argument("entropy weights need at least 2 samples");
    std::array<double, 4> column_sum{};
    for (const auto& row : rows)
        for (std::size_t j = 0; j < 4; ++j) {
            if (!(row[j] >= 0.0 && row[j] <= 1.0))
                throw std::invalid_argument("similarity sample outside [0,1]");
            column_sum[j] += row[j];
        }

    const double k = 1.0 / std::log(static_cast<double>(n));
    std::array<double, 4> divergence{};
    for (std::size_t j = 0; j < 4; ++j) {
        double e = 1.0;
        if (column_sum[j] > 0.0) {
            double acc = 0.0;
            for (const auto& row : rows) {
                const double p = row[j] / column_sum[j];
                if (p > 0.0) acc += p * std::log(p);
            }
            e = std::clamp(-k * acc, 0.0, 1.0);
        }
        divergence[j] = 1.0 - e;
    }
    const double total = divergence[0] + divergence[1] + divergence[2] + divergence[3];
    // Below this every column is effectively uniform.
    if (total <= 1e-15) return SimilarityWeights::uniform();
    std::array<double, 4> w{};
    for (std::size_t j = 0; j < 4; ++j) w[j] = divergence[j] / total;
    return SimilarityWeights::from_array(w);
}

}  // namespace mfstl
