#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lln/framing.hpp"
#include "lln/hopmodel.hpp"

namespace lln {

struct PathScenario {
    std::vector<HopParams> hops = std::vector<HopParams>(5);
    FrameLayout layout;
    std::uint32_t mss_bytes = 64;
    std::uint64_t transfer_bytes = 51200;

    void validate() const;
    std::uint64_t segments() const;

    // Homogeneous path: h hops sharing one BER and retry limit.
    static PathScenario uniform(std::size_t h, double ber, std::uint32_t r, std::uint32_t mss_bytes,
                                FrameLayout layout = {});

    friend bool operator==(const PathScenario&, const PathScenario&) = default;
};

struct EnergyParams {
    double tx_uj_per_bit = 0.24;
    double rx_uj_per_bit = 0.21;
    double n_neighbors = 2.0;

    void validate() const;
    // Microjoules per bit sent, counting the n listening neighbours.
    double uj_per_bit() const { return tx_uj_per_bit + n_neighbors * rx_uj_per_bit; }

    friend bool operator==(const EnergyParams&, const EnergyParams&) = default;
};

// Q_s together with its complement, each computed without cancellation.
struct PathSuccess {
    double q_s = 1.0;
    double q_f = 0.0;
    double log_q_s = 0.0;
};

double path_success_prob(std::span<const double> hop_failure);
PathSuccess path_success(std::span<const HopModel> hops);

struct PathBits {
    std::optional<double> e_s;  // empty when some hop is degenerate
    std::optional<double> e_f;  // empty when Q_s == 1
};

PathBits path_bits(std::span<const HopModel> hops);

// Expected bits for m fragments given that at least one of them is dropped.
// Normalized: the binomial sum divided by 1 - q_s^m (a true conditional mean).
// Empty when q_s is 0 or 1.
std::optional<double> fragment_failure_bits(std::uint32_t m, double q_s, double e_s, double e_f);
std::optional<double> fragment_failure_bits(std::uint32_t m, const PathSuccess& q, double e_s, double e_f);

// The binomial sum without normalization, and the published simplification of
// it, m (1 - q) E_f + m E_s q (1 - q^m). The two differ in the last exponent.
double fragment_failure_bits_unnormalized(std::uint32_t m, double q_s, double e_s, double e_f);
double fragment_failure_bits_published(std::uint32_t m, double q_s, double e_s, double e_f);

enum class FailureBitsVariant {
    Normalized,  // conditional expectation; matches the Monte Carlo process
    Published,   // literal closed form, for comparison
};

std::string_view to_string(FailureBitsVariant v);

enum class ModelStatus {
    Ok,
    Diverges,  // P_s == 0: the segment is never acknowledged
};

struct ModelReport {
    ResolvedFrames frames;
    std::vector<HopModel> data_hops;
    std::vector<HopModel> ack_hops;

    PathSuccess data_path;
    PathSuccess ack_path;
    std::optional<double> e_s, e_f, e_s_ack, e_f_ack;
    std::optional<double> i_f;

    double p_s = 1.0;
    double p_s_complement = 0.0;
    std::optional<double> s_s;
    std::optional<double> s_f;   // empty when P_s == 1
    std::optional<double> s;     // empty when the model diverges
    std::uint64_t segments = 0;
    std::optional<double> total_bits;
    std::optional<double> total_joules;

    ModelStatus status = ModelStatus::Ok;
    FailureBitsVariant variant = FailureBitsVariant::Normalized;
};

ModelReport segment_model(const PathScenario& scenario, const ResolvedFrames& frames,
                          std::vector<HopModel> data_hops, std::vector<HopModel> ack_hops,
                          const EnergyParams& energy,
                          FailureBitsVariant variant = FailureBitsVariant::Normalized);

// Resolves frames, builds per-hop models and runs segment_model.
ModelReport evaluate(const PathScenario& scenario, const EnergyParams& energy = {},
                     FailureBitsVariant variant = FailureBitsVariant::Normalized);

}  // namespace lln
