#include "mfstl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mfstl {

namespace {

struct Service {
    std::uint16_t port;
    std::uint8_t proto;
    double payload_log_mean;  // log of the typical payload in bytes
    double weight;
};

// A small mix resembling campus edge traffic.
constexpr Service kServices[] = {
    {80, 6, 7.6, 0.30},   {443, 6, 8.2, 0.30}, {53, 17, 4.4, 0.18}, {22, 6, 7.0, 0.04},
    {25, 6, 8.0, 0.05},   {123, 17, 3.9, 0.04}, {6881, 6, 9.5, 0.04}, {993, 6, 7.2, 0.05},
};

struct Server {
    IpAddress addr;
    std::size_t service;
};

// Uniform draws via raw engine output keep the stream identical across
// standard library implementations.
double unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

double exponential(std::mt19937_64& rng, double rate) { return -std::log1p(-unit(rng)) / rate; }

double normal(std::mt19937_64& rng) {
    // Box-Muller; one draw per call is enough here.
    const double u1 = 1.0 - unit(rng);
    const double u2 = unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::uint16_t ephemeral_port(std::mt19937_64& rng) {
    return static_cast<std::uint16_t>(49152 + below(rng, 16384));
}

void check(const SynthConfig& c) {
    if (!(c.duration > 0.0)) throw std::invalid_argument("duration must be positive");
    if (!(c.background_rate > 0.0)) throw std::invalid_argument("background rate must be positive");
    if (c.clients == 0 || c.servers == 0) throw std::invalid_argument("address pools must be non-empty");
    auto windows = c.attacks;
    std::sort(windows.begin(), windows.end(),
              [](const AttackWindow& a, const AttackWindow& b) { return a.start < b.start; });
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto& w = windows[i];
        if (!(w.rate > 0.0)) throw std::invalid_argument("attack rate must be positive");
        if (!(w.duration > 0.0)) throw std::invalid_argument("attack duration must be positive");
        if (w.start < 0.0 || w.start + w.duration > c.duration)
            throw std::invalid_argument("attack window outside trace duration");
        if (i > 0 && windows[i - 1].start + windows[i - 1].duration > w.start)
            throw std::invalid_argument("overlapping attack windows");
    }
}

}  // namespace

std::vector<FlowRecord> synth_trace(const SynthConfig& config) {
    check(config);
    std::mt19937_64 rng(config.seed);

    std::vector<IpAddress> clients;
    clients.reserve(config.clients);
    for (std::size_t i = 0; i < config.clients; ++i)
        clients.push_back(IpAddress::v4(0x0A000000u | static_cast<std::uint32_t>(below(rng, 1u << 16))));

    double total_weight = 0.0;
    for (const auto& s : kServices) total_weight += s.weight;
    std::vector<Server> servers;
    servers.reserve(config.servers);
    for (std::size_t i = 0; i < config.servers; ++i) {
        double pick = unit(rng) * total_weight;
        std::size_t svc = 0;
        while (svc + 1 < std::size(kServices) && pick >= kServices[svc].weight) {
            pick -= kServices[svc].weight;
            ++svc;
        }
        // Public-looking addresses spread over a few provider blocks.
        const std::uint32_t block = 0xC6120000u + static_cast<std::uint32_t>(below(rng, 8) << 16);
        servers.push_back({IpAddress::v4(block | static_cast<std::uint32_t>(below(rng, 1u << 16))), svc});
    }

    std::vector<FlowRecord> out;
    out.reserve(static_cast<std::size_t>(config.duration * config.background_rate * 1.1) + 16);

    const Micros end = seconds_to_micros(config.duration);
    double t = 0.0;
    while (true) {
        const Micros ts = seconds_to_micros(t);
        if (ts >= end) break;
        const auto& srv = servers[below(rng, servers.size())];
        const auto& svc = kServices[srv.service];
        FlowRecord r;
        r.ts = ts;
        r.sa = clients[below(rng, clients.size())];
        r.da = srv.addr;
        r.sp = ephemeral_port(rng);
        r.dp = svc.port;
        r.pr = svc.proto;
        r.ps = static_cast<std::uint64_t>(std::llround(std::exp(svc.payload_log_mean + 0.8 * normal(rng))));
        r.label = Label::Normal;
        out.push_back(r);
        t += exponential(rng, config.background_rate);
    }

    const IpAddress attacker = IpAddress::v4(0xCB007142u);  // 203.0.113.66
    for (const auto& w : config.attacks) {
        const Micros w_end = seconds_to_micros(w.start + w.duration);
        std::uint32_t next_target = static_cast<std::uint32_t>(below(rng, 1u << 16));
        double ta = w.start;
        while (true) {
            const Micros ts = seconds_to_micros(ta);
            if (ts >= w_end) break;
            FlowRecord r;
            r.ts = ts;
            r.sa = attacker;
            r.da = IpAddress::v4(0x0A000000u | (next_target++ & 0xFFFFu));
            r.sp = ephemeral_port(rng);
            r.dp = config.scan_port;
            r.pr = 6;
            r.ps = config.scan_payload;
            r.label = Label::Abnormal;
            out.push_back(r);
            ta += exponential(rng, w.rate);
        }
    }

    std::stable_sort(out.begin(), out.end(),
                     [](const FlowRecord& a, const FlowRecord& b) { return a.ts < b.ts; });
    return out;
}

}  // namespace mfstl
