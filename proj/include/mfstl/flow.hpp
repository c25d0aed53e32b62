#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mfstl {

/// Thrown for malformed flow input. The message carries the line number and
/// the offending field.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& field, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ", field '" + field + "': " + what),
          line_(line), field_(field) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

enum class Label : std::uint8_t { Normal, Abnormal };

std::string_view to_string(Label l) noexcept;

/// IPv4 or IPv6 address. IPv4 occupies the first four bytes.
struct IpAddress {
    bool v6 = false;
    std::array<std::uint8_t, 16> bytes{};

    static IpAddress parse(std::string_view text);   // throws std::invalid_argument
    static IpAddress v4(std::uint32_t host_order);

    int bit_length() const noexcept { return v6 ? 128 : 32; }
    std::string to_string() const;

    friend bool operator==(const IpAddress&, const IpAddress&) = default;
    friend auto operator<=>(const IpAddress&, const IpAddress&) = default;
};

/// Number of leading bits two addresses share; 0 across families.
int common_prefix_bits(const IpAddress& a, const IpAddress& b) noexcept;

/// Timestamps are kept as integer microseconds so window arithmetic is exact.
using Micros = std::int64_t;

Micros seconds_to_micros(double seconds);
double micros_to_seconds(Micros us) noexcept;

struct FlowRecord {
    Micros ts = 0;
    IpAddress sa;
    IpAddress da;
    std::uint16_t sp = 0;
    std::uint16_t dp = 0;
    std::uint8_t pr = 0;
    std::uint64_t ps = 0;
    std::optional<Label> label;

    double ts_seconds() const noexcept { return micros_to_seconds(ts); }

    friend bool operator==(const FlowRecord&, const FlowRecord&) = default;
};

enum class NodeMode : std::uint8_t { FiveTuple, TwoTuple };

std::string_view to_string(NodeMode m) noexcept;
NodeMode node_mode_from_string(std::string_view s);

/// Node identity of a flow. Fields not covered by the mode stay zeroed, so
/// equality on the struct is equality on the projection.
struct FlowKey {
    IpAddress sa;
    IpAddress da;
    std::uint16_t sp = 0;
    std::uint16_t dp = 0;
    std::uint8_t pr = 0;

    static FlowKey of(const FlowRecord& r, NodeMode mode) noexcept;

    std::string to_string(NodeMode mode) const;

    friend bool operator==(const FlowKey&, const FlowKey&) = default;
    friend auto operator<=>(const FlowKey&, const FlowKey&) = default;
};

struct FlowKeyHash {
    std::size_t operator()(const FlowKey& k) const noexcept;
};

struct SamplePartition {
    std::size_t index = 0;
    Micros start = 0;   // window is [start, start + width)
    Micros width = 0;
    std::vector<FlowRecord> records;
    std::optional<Label> label;
};

struct DatasetSplit {
    std::vector<SamplePartition> train;
    std::vector<SamplePartition> test;
    double ratio = 0.75;
};

/// Reads the `ts,sa,da,sp,dp,pr,ps,label` CSV. Output is sorted by ts,
/// stable for equal timestamps.
std::vector<FlowRecord> parse_flows(std::istream& in);
std::vector<FlowRecord> read_flow_file(const std::string& path);

void write_flows(std::ostream& out, const std::vector<FlowRecord>& records);

/// Contiguous windows of width `dt_seconds` starting at the first record.
/// Empty windows are kept.
std::vector<SamplePartition> partition_samples(const std::vector<FlowRecord>& records,
                                               double dt_seconds);

inline constexpr double kDefaultLabelThreshold = 0.001;

/// Abnormal iff abnormal/total >= threshold. Empty partitions are normal.
Label label_sample(const SamplePartition& p, double threshold = kDefaultLabelThreshold);

/// First floor(ratio * n) samples go to train, the rest to test.
DatasetSplit split_chronological(std::vector<SamplePartition> samples, double ratio);

}  // namespace mfstl
