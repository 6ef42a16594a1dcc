#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "lln/pathmodel.hpp"

namespace lln {

enum class Fidelity {
    FrameLevel,  // attempt outcomes drawn from the per-attempt probabilities
    BitLevel,    // bit errors drawn per frame, c-bit correction applied
};

enum class Estimator {
    // Replays every segment attempt until the TCP ACK gets back.
    Replay,
    // Samples independent segment attempts and uses E[total] = E[attempt bits] / P_s.
    // P_s is estimated under a lower BER with likelihood-ratio weights, which makes
    // configurations with P_s around 1e-10 tractable.
    Regenerative,
};

std::string_view to_string(Fidelity f);
std::string_view to_string(Estimator e);

struct SimConfig {
    PathScenario scenario;
    EnergyParams energy;
    std::uint64_t replications = 1000;
    std::uint64_t master_seed = 1;
    Fidelity fidelity = Fidelity::FrameLevel;
    Estimator estimator = Estimator::Replay;
    // Replay only: simulate this many segments and scale to the full transfer.
    std::optional<std::uint64_t> segment_cap;
    // Replay only: give up on a segment after this many attempts and flag the run.
    std::uint64_t attempt_cap = 1'000'000;
    // Regenerative only: segment attempts per replication under each measure.
    std::uint64_t regenerative_batch = 1000;
    unsigned threads = 0;

    void validate() const;
};

struct SimCounters {
    std::uint64_t link_attempts = 0;
    std::uint64_t link_failures = 0;
    std::uint64_t partial_failures = 0;
    std::uint64_t hop_drops = 0;
    std::uint64_t segment_sends = 0;
    std::uint64_t segment_retransmissions = 0;
    std::uint64_t duplicates_suppressed = 0;
    std::uint64_t tcp_ack_losses = 0;
    std::uint64_t truncated_segments = 0;

    SimCounters& operator+=(const SimCounters& o);
    friend bool operator==(const SimCounters&, const SimCounters&) = default;
};

struct SimReport {
    std::uint64_t replications = 0;
    std::uint64_t segments = 0;             // segments in the transfer
    std::uint64_t segments_simulated = 0;   // per replication (Replay)
    double mean_total_bits = 0.0;
    double stddev = 0.0;
    double std_error = 0.0;
    double ci95 = 0.0;  // half-width, normal approximation
    double mean_joules = 0.0;
    SimCounters counters;
    bool truncated = false;
    Fidelity fidelity = Fidelity::FrameLevel;
    Estimator estimator = Estimator::Replay;
    std::uint64_t master_seed = 0;
    double ber_scale = 1.0;  // Regenerative: BER multiplier used for the P_s estimate
};

inline constexpr std::string_view kRngName = "mt19937_64/seed_seq(master,replication)";

SimReport simulate(const SimConfig& config);

// Mean/variance accumulator with an exact pairwise merge.
struct RunningStats {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x);
    void merge(const RunningStats& other);
    double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
};

}  // namespace lln
