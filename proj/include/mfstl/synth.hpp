#pragma once

#include <cstdint>
#include <vector>

#include "mfstl/flow.hpp"

namespace mfstl {

enum class AttackPattern : std::uint8_t {
    /// One source probing many destinations on a fixed port with a fixed
    /// payload size.
    Scan,
};

struct AttackWindow {
    double start = 0.0;     // seconds from trace start
    double duration = 0.0;  // seconds
    double rate = 0.0;      // flows per second
    AttackPattern pattern = AttackPattern::Scan;
};

struct SynthConfig {
    double duration = 600.0;
    double background_rate = 50.0;
    std::vector<AttackWindow> attacks;
    std::uint64_t seed = 42;

    // Address and service pools for background traffic.
    std::size_t clients = 400;
    std::size_t servers = 60;
    std::uint16_t scan_port = 445;
    std::uint64_t scan_payload = 60;
};

/// Labeled synthetic trace sorted by timestamp. Background arrivals are a
/// Poisson process starting at t = 0; attack windows add labeled scan flows.
/// Bit-reproducible for a given config.
std::vector<FlowRecord> synth_trace(const SynthConfig& config);

}  // namespace mfstl
