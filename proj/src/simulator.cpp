#include "lln/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "lln/parallel.hpp"

namespace lln {

namespace {

using Rng = std::mt19937_64;

enum class Outcome { Fail, Partial, Success };

Rng make_rng(std::uint64_t master, std::uint64_t stream, std::uint32_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), tag};
    return Rng(seq);
}

// One direction of one hop for one frame type. Data-frame errors are drawn at
// draw_ber; when that differs from true_ber the log likelihood ratio of each
// draw is accumulated so estimates can be reweighted to the true BER. The link
// ACK never decides whether a frame gets through, so it is always drawn at
// true_ber and contributes nothing to the weight.
class Channel {
public:
    Channel(const HopFrame& frame, double true_ber, double draw_ber, Fidelity fidelity)
        : frame_(frame), fidelity_(fidelity), tilted_(draw_ber != true_ber),
          true_ber_(true_ber), draw_ber_(draw_ber),
          data_errors_(frame.d_bits, draw_ber), ack_errors_(frame.a_bits, true_ber) {
        const AttemptProbs truth = attempt_probs(frame.d_bits, frame.c_bits, frame.a_bits, true_ber);
        ack_lost_ = truth.p_arrive > 0.0 ? truth.p_partial / truth.p_arrive : 0.0;
        if (tilted_) {
            const BinomialTails drawn = binomial_tails(frame.d_bits, frame.c_bits, draw_ber);
            draw_fail_ = drawn.above;
            lr_fail_ = std::log(truth.p_fail) - std::log(drawn.above);
            lr_arrive_ = std::log(truth.p_arrive) - std::log(drawn.at_most);
            partial_ = drawn.at_most * ack_lost_;
        } else {
            draw_fail_ = truth.p_fail;
            partial_ = truth.p_partial;
        }
    }

    Outcome draw(Rng& rng, double& log_lr) {
        return fidelity_ == Fidelity::FrameLevel ? draw_frame(rng, log_lr) : draw_bits(rng, log_lr);
    }

    std::uint32_t d_bits() const { return frame_.d_bits; }
    std::uint32_t a_bits() const { return frame_.a_bits; }

private:
    Outcome draw_frame(Rng& rng, double& log_lr) {
        const double u = unit_(rng);
        if (u < draw_fail_) {
            if (tilted_) log_lr += lr_fail_;
            return Outcome::Fail;
        }
        if (tilted_) log_lr += lr_arrive_;
        return u < draw_fail_ + partial_ ? Outcome::Partial : Outcome::Success;
    }

    Outcome draw_bits(Rng& rng, double& log_lr) {
        const std::uint32_t data_err = draw_ber_ > 0.0 ? data_errors_(rng) : 0;
        if (tilted_) log_lr += bit_log_lr(data_err, frame_.d_bits);
        if (data_err > frame_.c_bits) return Outcome::Fail;
        const std::uint32_t ack_err = true_ber_ > 0.0 ? ack_errors_(rng) : 0;
        return ack_err > 0 ? Outcome::Partial : Outcome::Success;
    }

    double bit_log_lr(std::uint32_t errors, std::uint32_t bits) const {
        double lr = static_cast<double>(bits - errors) * (std::log1p(-true_ber_) - std::log1p(-draw_ber_));
        if (errors > 0) lr += errors * (std::log(true_ber_) - std::log(draw_ber_));
        return lr;
    }

    HopFrame frame_;
    Fidelity fidelity_;
    bool tilted_;
    double true_ber_;
    double draw_ber_;
    double ack_lost_ = 0.0;
    double draw_fail_ = 0.0;
    double partial_ = 0.0;
    double lr_fail_ = 0.0;
    double lr_arrive_ = 0.0;
    std::binomial_distribution<std::uint32_t> data_errors_;
    std::binomial_distribution<std::uint32_t> ack_errors_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

struct PathChannels {
    std::vector<Channel> data;
    std::vector<Channel> ack;
    std::vector<std::uint32_t> attempts;
    std::uint32_t m = 1;
};

PathChannels build_channels(const SimConfig& cfg, const ResolvedFrames& frames, double ber_scale) {
    PathChannels pc;
    pc.m = frames.m;
    const HopFrame data{frames.data.d_bits, frames.data.c_bits, frames.ll_ack_bits};
    const HopFrame ack{frames.ack.d_bits, frames.ack.c_bits, frames.ll_ack_bits};
    for (const auto& hop : cfg.scenario.hops) {
        const double draw_ber = hop.ber * ber_scale;
        pc.data.emplace_back(data, hop.ber, draw_ber, cfg.fidelity);
        pc.ack.emplace_back(ack, hop.ber, draw_ber, cfg.fidelity);
        pc.attempts.push_back(hop.max_attempts);
    }
    return pc;
}

struct AttemptResult {
    double bits = 0.0;
    bool fragments_arrived = false;
    bool success = false;
    double log_lr = 0.0;
};

class SegmentWalker {
public:
    SegmentWalker(PathChannels& channels, Rng& rng, SimCounters& counters)
        : ch_(channels), rng_(rng), c_(counters) {}

    // All m fragments are sent; the TCP ACK goes back only if every one arrived.
    AttemptResult attempt() {
        AttemptResult res;
        bool all = true;
        for (std::uint32_t i = 0; i < ch_.m; ++i) all = traverse(ch_.data, res) && all;
        res.fragments_arrived = all;
        if (all) {
            res.success = traverse(ch_.ack, res);
            if (!res.success) ++c_.tcp_ack_losses;
        }
        ++c_.segment_sends;
        return res;
    }

private:
    bool traverse(std::vector<Channel>& hops, AttemptResult& res) {
        for (std::size_t h = 0; h < hops.size(); ++h) {
            Channel& link = hops[h];
            bool received = false;
            for (std::uint32_t a = 0; a < ch_.attempts[h]; ++a) {
                ++c_.link_attempts;
                res.bits += link.d_bits();
                const Outcome o = link.draw(rng_, res.log_lr);
                if (o == Outcome::Fail) {
                    ++c_.link_failures;
                    continue;
                }
                res.bits += link.a_bits();
                if (received) ++c_.duplicates_suppressed;
                received = true;
                if (o == Outcome::Success) break;
                ++c_.partial_failures;
            }
            if (!received) {
                ++c_.hop_drops;
                return false;
            }
        }
        return true;
    }

    PathChannels& ch_;
    Rng& rng_;
    SimCounters& c_;
};

struct ReplicationResult {
    double total_bits = 0.0;   // Replay
    double attempt_bits = 0.0;  // Regenerative: mean bits per segment attempt
    double p_success = 0.0;     // Regenerative: weighted success fraction
    SimCounters counters;
};

ReplicationResult replay_replication(const SimConfig& cfg, const PathChannels& proto,
                                     std::uint64_t segments_to_run, std::uint64_t index) {
    ReplicationResult out;
    PathChannels ch = proto;
    Rng rng = make_rng(cfg.master_seed, index, 0);
    SegmentWalker walker(ch, rng, out.counters);
    const std::uint64_t segments = cfg.scenario.segments();

    double bits = 0.0;
    for (std::uint64_t s = 0; s < segments_to_run; ++s) {
        std::uint64_t sends = 0;
        for (;;) {
            const AttemptResult a = walker.attempt();
            bits += a.bits;
            ++sends;
            if (a.success) break;
            if (sends >= cfg.attempt_cap) {
                ++out.counters.truncated_segments;
                break;
            }
        }
        out.counters.segment_retransmissions += sends - 1;
    }
    out.total_bits = bits * static_cast<double>(segments) / static_cast<double>(segments_to_run);
    return out;
}

ReplicationResult regenerative_replication(const SimConfig& cfg, const PathChannels& natural_proto,
                                           const PathChannels& tilted_proto, std::uint64_t index) {
    ReplicationResult out;
    PathChannels natural = natural_proto;
    PathChannels tilted = tilted_proto;
    Rng rng = make_rng(cfg.master_seed, index, 0);
    const std::uint64_t n = cfg.regenerative_batch;

    SimCounters scratch;
    SegmentWalker walker(natural, rng, out.counters);
    double bits = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) bits += walker.attempt().bits;

    SegmentWalker weighted(tilted, rng, scratch);
    double success_weight = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const AttemptResult a = weighted.attempt();
        if (a.success) success_weight += std::exp(a.log_lr);
    }

    out.attempt_bits = bits / static_cast<double>(n);
    out.p_success = success_weight / static_cast<double>(n);
    return out;
}

// Halve the BER until a pilot batch sees at least a quarter of attempts succeed.
double pick_ber_scale(const SimConfig& cfg, const ResolvedFrames& frames) {
    constexpr std::uint64_t kPilot = 256;
    Rng rng = make_rng(cfg.master_seed, ~std::uint64_t{0}, 1);
    double scale = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        PathChannels ch = build_channels(cfg, frames, scale);
        SimCounters scratch;
        SegmentWalker walker(ch, rng, scratch);
        std::uint64_t ok = 0;
        for (std::uint64_t i = 0; i < kPilot; ++i) ok += walker.attempt().success ? 1 : 0;
        if (4 * ok >= kPilot) return scale;
        scale *= 0.5;
    }
    return scale;
}

}  // namespace

std::string_view to_string(Fidelity f) {
    return f == Fidelity::FrameLevel ? "frame" : "bit";
}

std::string_view to_string(Estimator e) {
    return e == Estimator::Replay ? "replay" : "regenerative";
}

SimCounters& SimCounters::operator+=(const SimCounters& o) {
    link_attempts += o.link_attempts;
    link_failures += o.link_failures;
    partial_failures += o.partial_failures;
    hop_drops += o.hop_drops;
    segment_sends += o.segment_sends;
    segment_retransmissions += o.segment_retransmissions;
    duplicates_suppressed += o.duplicates_suppressed;
    tcp_ack_losses += o.tcp_ack_losses;
    truncated_segments += o.truncated_segments;
    return *this;
}

void RunningStats::add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
}

void RunningStats::merge(const RunningStats& other) {
    if (other.count == 0) return;
    if (count == 0) {
        *this = other;
        return;
    }
    const double n_a = static_cast<double>(count);
    const double n_b = static_cast<double>(other.count);
    const double n = n_a + n_b;
    const double delta = other.mean - mean;
    mean += delta * n_b / n;
    m2 += other.m2 + delta * delta * n_a * n_b / n;
    count += other.count;
}

void SimConfig::validate() const {
    scenario.validate();
    energy.validate();
    if (replications < 1) throw std::invalid_argument("sim: replications must be at least 1");
    if (segment_cap && *segment_cap < 1) throw std::invalid_argument("sim: segment_cap must be at least 1");
    if (attempt_cap < 1) throw std::invalid_argument("sim: attempt_cap must be at least 1");
    if (regenerative_batch < 2) throw std::invalid_argument("sim: regenerative_batch must be at least 2");
}

SimReport simulate(const SimConfig& config) {
    config.validate();
    const ResolvedFrames frames = resolve_frames(config.scenario.mss_bytes, config.scenario.layout);
    const std::uint64_t segments = config.scenario.segments();
    const std::uint64_t to_run = config.segment_cap ? std::min(*config.segment_cap, segments) : segments;

    SimReport rep;
    rep.replications = config.replications;
    rep.segments = segments;
    rep.fidelity = config.fidelity;
    rep.estimator = config.estimator;
    rep.master_seed = config.master_seed;

    std::vector<ReplicationResult> results(config.replications);
    const PathChannels natural = build_channels(config, frames, 1.0);
    if (config.estimator == Estimator::Replay) {
        rep.segments_simulated = to_run;
        parallel_for(results.size(), config.threads, [&](std::size_t i) {
            results[i] = replay_replication(config, natural, to_run, i);
        });
    } else {
        rep.ber_scale = pick_ber_scale(config, frames);
        const PathChannels tilted = build_channels(config, frames, rep.ber_scale);
        parallel_for(results.size(), config.threads, [&](std::size_t i) {
            results[i] = regenerative_replication(config, natural, tilted, i);
        });
    }

    // Fixed index order keeps the floating-point result independent of threading.
    for (const auto& r : results) rep.counters += r.counters;
    RunningStats stats;
    if (config.estimator == Estimator::Replay) {
        for (const auto& r : results) stats.add(r.total_bits);
        rep.mean_total_bits = stats.mean;
    } else {
        // Ratio of pooled means; averaging per-replication ratios would carry
        // the bias of 1/p from every small batch.
        RunningStats bits, p;
        for (const auto& r : results) {
            bits.add(r.attempt_bits);
            p.add(r.p_success);
        }
        const double seg = static_cast<double>(segments);
        const double ratio = bits.mean / p.mean;
        // Linearized per-replication contributions give the delta-method error.
        for (const auto& r : results) stats.add(seg * (r.attempt_bits - ratio * r.p_success) / p.mean);
        rep.mean_total_bits = seg * ratio;
        if (!(p.mean > 0.0)) ++rep.counters.truncated_segments;
    }
    rep.truncated = rep.counters.truncated_segments > 0;
    rep.stddev = std::sqrt(stats.variance());
    rep.std_error = rep.stddev / std::sqrt(static_cast<double>(stats.count));
    rep.ci95 = 1.959963984540054 * rep.std_error;
    rep.mean_joules = rep.mean_total_bits * config.energy.uj_per_bit() * 1e-6;
    return rep;
}

}  // namespace lln
