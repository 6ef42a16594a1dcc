#include "lln/pathmodel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace lln {

namespace {

// log(1 - f), choosing the representation that keeps precision.
double log_survival(const HopModel& hop) {
    if (hop.f < 0.5) return std::log1p(-hop.f);
    if (hop.f_complement <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(hop.f_complement);
}

PathSuccess from_log(double log_q_s) {
    PathSuccess q;
    q.log_q_s = log_q_s;
    q.q_s = std::exp(log_q_s);
    q.q_f = -std::expm1(log_q_s);
    return q;
}

PathSuccess from_q(double q_s) {
    if (!(q_s >= 0.0 && q_s <= 1.0)) throw std::invalid_argument("q_s must lie in [0, 1]");
    PathSuccess q;
    q.q_s = q_s;
    q.q_f = 1.0 - q_s;
    q.log_q_s = q_s > 0.0 ? std::log(q_s) : -std::numeric_limits<double>::infinity();
    return q;
}

double binomial_coefficient(std::uint32_t n, std::uint32_t k) {
    double c = 1.0;
    for (std::uint32_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return c;
}

double unnormalized_sum(std::uint32_t m, const PathSuccess& q, double e_s, double e_f) {
    double sum = 0.0;
    for (std::uint32_t k = 1; k <= m; ++k) {
        sum += binomial_coefficient(m, k) * (k * e_f + (m - k) * e_s) * std::pow(q.q_f, k) *
               std::pow(q.q_s, m - k);
    }
    return sum;
}

}  // namespace

void PathScenario::validate() const {
    if (hops.empty()) throw std::invalid_argument("scenario: at least one hop is required");
    for (const auto& hop : hops) hop.validate();
    layout.validate();
    if (mss_bytes == 0) throw std::invalid_argument("scenario: mss_bytes must be positive");
    if (transfer_bytes == 0) throw std::invalid_argument("scenario: transfer_bytes must be positive");
}

std::uint64_t PathScenario::segments() const {
    return (transfer_bytes + mss_bytes - 1) / mss_bytes;
}

PathScenario PathScenario::uniform(std::size_t h, double ber, std::uint32_t r, std::uint32_t mss_bytes,
                                   FrameLayout layout) {
    PathScenario s;
    s.hops.assign(h, HopParams{ber, r});
    s.layout = std::move(layout);
    s.mss_bytes = mss_bytes;
    return s;
}

void EnergyParams::validate() const {
    if (!(tx_uj_per_bit >= 0.0) || !(rx_uj_per_bit >= 0.0) || !(n_neighbors >= 0.0))
        throw std::invalid_argument("energy parameters must be non-negative");
}

double path_success_prob(std::span<const double> hop_failure) {
    double log_q = 0.0;
    for (double f : hop_failure) {
        if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("hop failure probability must lie in [0, 1]");
        log_q += std::log1p(-f);
    }
    return std::exp(log_q);
}

PathSuccess path_success(std::span<const HopModel> hops) {
    double log_q = 0.0;
    for (const auto& hop : hops) log_q += log_survival(hop);
    return from_log(log_q);
}

PathBits path_bits(std::span<const HopModel> hops) {
    if (hops.empty()) throw std::invalid_argument("path_bits: at least one hop is required");
    PathBits out;

    double e_s = 0.0;
    bool complete = true;
    for (const auto& hop : hops) {
        if (!hop.h_s) {
            complete = false;
            break;
        }
        e_s += *hop.h_s;
    }
    if (complete) out.e_s = e_s;

    const PathSuccess q = path_success(hops);
    if (q.q_f <= 0.0) return out;

    // Loss at hop k: full success cost on the hops before it, r * D on hop k.
    double weighted = 0.0;
    double prefix_bits = 0.0;
    double prefix_prob = 1.0;
    for (const auto& hop : hops) {
        weighted += (prefix_bits + hop.h_f) * prefix_prob * hop.f;
        if (!hop.h_s) break;
        prefix_bits += *hop.h_s;
        prefix_prob *= hop.f_complement;
    }
    out.e_f = weighted / q.q_f;
    return out;
}

std::optional<double> fragment_failure_bits(std::uint32_t m, const PathSuccess& q, double e_s, double e_f) {
    if (m < 1) throw std::invalid_argument("fragment_failure_bits: m must be positive");
    if (q.q_f <= 0.0 || q.q_s <= 0.0) return std::nullopt;
    const double any_lost = -std::expm1(static_cast<double>(m) * q.log_q_s);
    return unnormalized_sum(m, q, e_s, e_f) / any_lost;
}

std::optional<double> fragment_failure_bits(std::uint32_t m, double q_s, double e_s, double e_f) {
    return fragment_failure_bits(m, from_q(q_s), e_s, e_f);
}

double fragment_failure_bits_unnormalized(std::uint32_t m, double q_s, double e_s, double e_f) {
    if (m < 1) throw std::invalid_argument("fragment_failure_bits: m must be positive");
    return unnormalized_sum(m, from_q(q_s), e_s, e_f);
}

double fragment_failure_bits_published(std::uint32_t m, double q_s, double e_s, double e_f) {
    if (m < 1) throw std::invalid_argument("fragment_failure_bits: m must be positive");
    const PathSuccess q = from_q(q_s);
    const double md = m;
    return md * q.q_f * e_f + md * e_s * q.q_s * (1.0 - std::pow(q.q_s, md));
}

std::string_view to_string(FailureBitsVariant v) {
    return v == FailureBitsVariant::Normalized ? "normalized" : "published";
}

ModelReport segment_model(const PathScenario& scenario, const ResolvedFrames& frames,
                          std::vector<HopModel> data_hops, std::vector<HopModel> ack_hops,
                          const EnergyParams& energy, FailureBitsVariant variant) {
    if (data_hops.empty() || data_hops.size() != ack_hops.size())
        throw std::invalid_argument("segment_model: data and ACK hop lists must be non-empty and equal length");
    if (frames.m < 1 || frames.data.d_bits == 0 || frames.ack.d_bits == 0)
        throw std::invalid_argument("segment_model: frames are not resolved");

    ModelReport rep;
    rep.frames = frames;
    rep.variant = variant;
    rep.data_hops = std::move(data_hops);
    rep.ack_hops = std::move(ack_hops);
    rep.segments = scenario.segments();

    rep.data_path = path_success(rep.data_hops);
    rep.ack_path = path_success(rep.ack_hops);
    const PathBits data_bits = path_bits(rep.data_hops);
    const PathBits ack_bits = path_bits(rep.ack_hops);
    rep.e_s = data_bits.e_s;
    rep.e_f = data_bits.e_f;
    rep.e_s_ack = ack_bits.e_s;
    rep.e_f_ack = ack_bits.e_f;

    const double m = frames.m;
    const double log_all_arrive = m * rep.data_path.log_q_s;
    const double log_p_s = log_all_arrive + rep.ack_path.log_q_s;
    rep.p_s = std::exp(log_p_s);
    rep.p_s_complement = -std::expm1(log_p_s);

    if (rep.p_s <= 0.0 || !rep.e_s || !rep.e_s_ack) {
        rep.status = ModelStatus::Diverges;
        return rep;
    }

    rep.s_s = m * *rep.e_s + *rep.e_s_ack;

    const double all_arrive = std::exp(log_all_arrive);
    const double some_lost = -std::expm1(log_all_arrive);
    if (some_lost > 0.0 && rep.e_f) {
        rep.i_f = variant == FailureBitsVariant::Normalized
                      ? fragment_failure_bits(frames.m, rep.data_path, *rep.e_s, *rep.e_f)
                      : std::optional<double>(fragment_failure_bits_published(
                            frames.m, rep.data_path.q_s, *rep.e_s, *rep.e_f));
    }

    // Failure-weighted cost; S_f is this divided by 1 - P_s.
    double failure_mass = 0.0;
    if (some_lost > 0.0 && rep.i_f) failure_mass += *rep.i_f * some_lost;
    if (rep.ack_path.q_f > 0.0 && rep.e_f_ack)
        failure_mass += (m * *rep.e_s + *rep.e_f_ack) * all_arrive * rep.ack_path.q_f;

    if (rep.p_s_complement > 0.0) rep.s_f = failure_mass / rep.p_s_complement;

    // s = S_f (1 / P_s - 1) + S_s, with the (1 - P_s) factors cancelled.
    const double s = failure_mass / rep.p_s + *rep.s_s;
    if (!std::isfinite(s)) {
        rep.status = ModelStatus::Diverges;
        return rep;
    }
    rep.s = s;
    rep.total_bits = static_cast<double>(rep.segments) * s;
    rep.total_joules = *rep.total_bits * energy.uj_per_bit() * 1e-6;
    return rep;
}

ModelReport evaluate(const PathScenario& scenario, const EnergyParams& energy, FailureBitsVariant variant) {
    scenario.validate();
    energy.validate();
    const ResolvedFrames frames = resolve_frames(scenario.mss_bytes, scenario.layout);
    const HopFrame data{frames.data.d_bits, frames.data.c_bits, frames.ll_ack_bits};
    const HopFrame ack{frames.ack.d_bits, frames.ack.c_bits, frames.ll_ack_bits};

    std::vector<HopModel> data_hops;
    std::vector<HopModel> ack_hops;
    data_hops.reserve(scenario.hops.size());
    ack_hops.reserve(scenario.hops.size());
    for (std::size_t i = 0; i < scenario.hops.size(); ++i) {
        const HopParams& hop = scenario.hops[i];
        if (i > 0 && hop == scenario.hops[i - 1]) {
            data_hops.push_back(data_hops.back());
            ack_hops.push_back(ack_hops.back());
            continue;
        }
        data_hops.push_back(hop_model(data, hop));
        ack_hops.push_back(hop_model(ack, hop));
    }
    return segment_model(scenario, frames, std::move(data_hops), std::move(ack_hops), energy, variant);
}

}  // namespace lln
