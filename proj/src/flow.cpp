#include "mfstl/flow.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace mfstl {

std::string_view to_string(Label l) noexcept {
    return l == Label::Abnormal ? "abnormal" : "normal";
}

IpAddress IpAddress::parse(std::string_view text) {
    std::string s(text);
    IpAddress a;
    if (s.find(':') != std::string::npos) {
        a.v6 = true;
        if (inet_pton(AF_INET6, s.c_str(), a.bytes.data()) != 1)
            throw std::invalid_argument("invalid IPv6 address '" + s + "'");
    } else {
        if (inet_pton(AF_INET, s.c_str(), a.bytes.data()) != 1)
            throw std::invalid_argument("invalid IPv4 address '" + s + "'");
    }
    return a;
}

IpAddress IpAddress::v4(std::uint32_t host_order) {
    IpAddress a;
    a.bytes[0] = static_cast<std::uint8_t>(host_order >> 24);
    a.bytes[1] = static_cast<std::uint8_t>(host_order >> 16);
    a.bytes[2] = static_cast<std::uint8_t>(host_order >> 8);
    a.bytes[3] = static_cast<std::uint8_t>(host_order);
    return a;
}

std::string IpAddress::to_string() const {
    char buf[INET6_ADDRSTRLEN] = {};
    inet_ntop(v6 ? AF_INET6 : AF_INET, bytes.data(), buf, sizeof buf);
    return buf;
}

int common_prefix_bits(const IpAddress& a, const IpAddress& b) noexcept {
    if (a.v6 != b.v6) return 0;
    const int nbytes = a.v6 ? 16 : 4;
    int bits = 0;
    for (int i = 0; i < nbytes; ++i) {
        const auto diff = static_cast<std::uint8_t>(a.bytes[i] ^ b.bytes[i]);
        if (diff == 0) {
            bits += 8;
            continue;
        }
        return bits + std::countl_zero(diff);
    }
    return bits;
}

Micros seconds_to_micros(double seconds) {
    return static_cast<Micros>(std::llround(seconds * 1e6));
}

double micros_to_seconds(Micros us) noexcept { return static_cast<double>(us) / 1e6; }

std::string_view to_string(NodeMode m) noexcept {
    return m == NodeMode::TwoTuple ? "two-tuple" : "five-tuple";
}

NodeMode node_mode_from_string(std::string_view s) {
    if (s == "five-tuple" || s == "5") return NodeMode::FiveTuple;
    if (s == "two-tuple" || s == "2") return NodeMode::TwoTuple;
    throw std::invalid_argument("unknown node mode '" + std::string(s) + "'");
}

FlowKey FlowKey::of(const FlowRecord& r, NodeMode mode) noexcept {
    FlowKey k;
    k.sa = r.sa;
    k.da = r.da;
    if (mode == NodeMode::FiveTuple) {
        k.sp = r.sp;
        k.dp = r.dp;
        k.pr = r.pr;
    }
    return k;
}

std::string FlowKey::to_string(NodeMode mode) const {
    if (mode == NodeMode::TwoTuple) return sa.to_string() + ">" + da.to_string();
    return sa.to_string() + ":" + std::to_string(sp) + ">" + da.to_string() + ":" +
           std::to_string(dp) + "/" + std::to_string(pr);
}

std::size_t FlowKeyHash::operator()(const FlowKey& k) const noexcept {
    // FNV-1a over the projected bytes.
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint8_t b) {
        h ^= b;
        h *= 1099511628211ULL;
    };
    mix(k.sa.v6);
    for (auto b : k.sa.bytes) mix(b);
    mix(k.da.v6);
    for (auto b : k.da.bytes) mix(b);
    mix(static_cast<std::uint8_t>(k.sp >> 8));
    mix(static_cast<std::uint8_t>(k.sp));
    mix(static_cast<std::uint8_t>(k.dp >> 8));
    mix(static_cast<std::uint8_t>(k.dp));
    mix(k.pr);
    return static_cast<std::size_t>(h);
}

namespace {

const char* const kHeader = "ts,sa,da,sp,dp,pr,ps,label";

template <typename T>
T parse_unsigned(std::string_view text, std::uint64_t max, std::size_t line, const char* field,
                 const char* range_msg) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec == std::errc::invalid_argument || ptr != text.data() + text.size())
        throw ParseError(line, field, "not an unsigned integer: '" + std::string(text) + "'");
    if (ec == std::errc::result_out_of_range || v > max) throw ParseError(line, field, range_msg);
    return static_cast<T>(v);
}

// Decimal seconds to microseconds without going through binary floating point.
Micros parse_timestamp(std::string_view text, std::size_t line) {
    if (text.empty()) throw ParseError(line, "ts", "empty timestamp");
    if (text.front() == '-') throw ParseError(line, "ts", "timestamp must be non-negative");
    const auto dot = text.find('.');
    const std::string_view whole = text.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);

    std::int64_t secs = 0;
    if (!whole.empty()) {
        auto [ptr, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), secs);
        if (ec != std::errc{} || ptr != whole.data() + whole.size())
            throw ParseError(line, "ts", "not a decimal number: '" + std::string(text) + "'");
    } else if (frac.empty()) {
        throw ParseError(line, "ts", "not a decimal number: '" + std::string(text) + "'");
    }
    if (secs > std::numeric_limits<std::int64_t>::max() / 1'000'000 - 1)
        throw ParseError(line, "ts", "timestamp out of range");

    std::int64_t us = 0;
    int digits = 0;
    bool round_up = false;
    for (std::size_t i = 0; i < frac.size(); ++i) {
        const char c = frac[i];
        if (c < '0' || c > '9')
            throw ParseError(line, "ts", "not a decimal number: '" + std::string(text) + "'");
        if (digits < 6) {
            us = us * 10 + (c - '0');
            ++digits;
        } else if (i == 6) {
            round_up = c >= '5';
        }
    }
    for (; digits < 6; ++digits) us *= 10;
    return secs * 1'000'000 + us + (round_up ? 1 : 0);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::vector<FlowRecord> parse_flows(std::istream& in) {
    std::vector<FlowRecord> out;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto text = trim(line);
        if (text.empty()) continue;
        if (!have_header) {
            if (text != kHeader)
                throw ParseError(lineno, "header", "expected header '" + std::string(kHeader) + "'");
            have_header = true;
            continue;
        }
        auto fields = split_fields(text);
        if (fields.size() == 7) fields.emplace_back();  // trailing empty label without comma
        if (fields.size() != 8)
            throw ParseError(lineno, "row", "expected 8 fields, got " + std::to_string(fields.size()));
        for (auto& f : fields) f = trim(f);

        FlowRecord r;
        r.ts = parse_timestamp(fields[0], lineno);
        try {
            r.sa = IpAddress::parse(fields[1]);
        } catch (const std::invalid_argument& e) {
            throw ParseError(lineno, "sa", e.what());
        }
        try {
            r.da = IpAddress::parse(fields[2]);
        } catch (const std::invalid_argument& e) {
            throw ParseError(lineno, "da", e.what());
        }
        r.sp = parse_unsigned<std::uint16_t>(fields[3], 65535, lineno, "sp", "port out of range");
        r.dp = parse_unsigned<std::uint16_t>(fields[4], 65535, lineno, "dp", "port out of range");
        r.pr = parse_unsigned<std::uint8_t>(fields[5], 255, lineno, "pr", "protocol out of range");
        r.ps = parse_unsigned<std::uint64_t>(fields[6], std::numeric_limits<std::uint64_t>::max(),
                                             lineno, "ps", "payload size out of range");
        const auto lab = fields[7];
        if (lab == "normal")
            r.label = Label::Normal;
        else if (lab == "abnormal")
            r.label = Label::Abnormal;
        else if (!lab.empty())
            throw ParseError(lineno, "label", "expected '', 'normal' or 'abnormal', got '" +
                                                  std::string(lab) + "'");
        out.push_back(std::move(r));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const FlowRecord& a, const FlowRecord& b) { return a.ts < b.ts; });
    return out;
}

std::vector<FlowRecord> read_flow_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open flow file '" + path + "'");
    return parse_flows(in);
}

void write_flows(std::ostream& out, const std::vector<FlowRecord>& records) {
    out << kHeader << '\n';
    char ts[32];
    for (const auto& r : records) {
        std::snprintf(ts, sizeof ts, "%lld.%06lld", static_cast<long long>(r.ts / 1'000'000),
                      static_cast<long long>(r.ts % 1'000'000));
        out << ts << ',' << r.sa.to_string() << ',' << r.da.to_string() << ',' << r.sp << ','
            << r.dp << ',' << static_cast<unsigned>(r.pr) << ',' << r.ps << ','
            << (r.label ? to_string(*r.label) : std::string_view{}) << '\n';
    }
}

std::vector<SamplePartition> partition_samples(const std::vector<FlowRecord>& records,
                                               double dt_seconds) {
    if (!(dt_seconds > 0.0)) throw std::invalid_argument("sampling window must be positive");
    const Micros width = seconds_to_micros(dt_seconds);
    if (width <= 0) throw std::invalid_argument("sampling window below microsecond resolution");

    std::vector<SamplePartition> out;
    if (records.empty()) return out;
    const Micros origin = records.front().ts;
    const auto count = static_cast<std::size_t>((records.back().ts - origin) / width) + 1;
    out.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i].index = i;
        out[i].start = origin + static_cast<Micros>(i) * width;
        out[i].width = width;
    }
    for (const auto& r : records) {
        if (r.ts < origin) throw std::invalid_argument("records must be sorted by timestamp");
        out[static_cast<std::size_t>((r.ts - origin) / width)].records.push_back(r);
    }
    return out;
}

Label label_sample(const SamplePartition& p, double threshold) {
    std::size_t abnormal = 0;
    for (const auto& r : p.records) {
        if (!r.label) throw std::invalid_argument("sample contains an unlabeled flow record");
        if (*r.label == Label::Abnormal) ++abnormal;
    }
    if (p.records.empty()) return Label::Normal;
    const double ratio = static_cast<double>(abnormal) / static_cast<double>(p.records.size());
    return ratio >= threshold ? Label::Abnormal : Label::Normal;
}

DatasetSplit split_chronological(std::vector<SamplePartition> samples, double ratio) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split ratio must be in (0,1)");
    if (samples.size() < 2) throw std::invalid_argument("need at least 2 samples to split");
    const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(samples.size())));
    if (n_train == 0 || n_train == samples.size())
        throw std::invalid_argument("split ratio leaves train or test empty");
    DatasetSplit split;
    split.ratio = ratio;
    split.train.assign(std::make_move_iterator(samples.begin()),
                       std::make_move_iterator(samples.begin() + static_cast<std::ptrdiff_t>(n_train)));
    split.test.assign(std::make_move_iterator(samples.begin() + static_cast<std::ptrdiff_t>(n_train)),
                      std::make_move_iterator(samples.end()));
    return split;
}

}  // namespace mfstl
