#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "lln/simulator.hpp"

using namespace lln;

namespace {

SimConfig make(double ber, std::uint32_t r, std::uint32_t mss, std::uint64_t reps, FrameLayout layout = {}) {
    SimConfig c;
    c.scenario = PathScenario::uniform(5, ber, r, mss, layout);
    c.replications = reps;
    c.master_seed = 42;
    c.threads = 1;
    return c;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool identical(const SimReport& a, const SimReport& b) {
    return same_bits(a.mean_total_bits, b.mean_total_bits) && same_bits(a.stddev, b.stddev) &&
           same_bits(a.std_error, b.std_error) && same_bits(a.mean_joules, b.mean_joules) &&
           a.counters == b.counters && a.truncated == b.truncated && same_bits(a.ber_scale, b.ber_scale);
}

double z_score(const SimReport& sim, double model) { return std::abs(sim.mean_total_bits - model) / sim.std_error; }

}  // namespace

TEST_CASE("zero noise gives the closed form with no spread") {
    for (Fidelity fid : {Fidelity::FrameLevel, Fidelity::BitLevel}) {
        SimConfig c = make(0.0, 3, 64, 20);
        c.fidelity = fid;
        const SimReport rep = simulate(c);
        CHECK(rep.mean_total_bits == 5888000.0);
        CHECK(rep.stddev == 0.0);
        CHECK(rep.counters.segment_retransmissions == 0);
        CHECK(rep.counters.link_attempts == 20ull * 800 * 10);
    }
    const SimReport r512 = simulate(make(0.0, 3, 512, 5));
    CHECK(r512.mean_total_bits == 3088000.0);
}

TEST_CASE("segment cap extrapolates linearly") {
    SimConfig c = make(0.0, 3, 64, 3);
    c.segment_cap = 10;
    const SimReport rep = simulate(c);
    CHECK(rep.segments_simulated == 10);
    CHECK(rep.mean_total_bits == 5888000.0);
}

TEST_CASE("identical seeds give identical reports for any thread count") {
    SimConfig c = make(3e-4, 3, 64, 40);
    const SimReport serial = simulate(c);
    for (unsigned t : {2u, 3u, 8u}) {
        c.threads = t;
        CHECK(identical(serial, simulate(c)));
    }
    c.master_seed = 43;
    CHECK_FALSE(identical(serial, simulate(c)));
}

TEST_CASE("frame-level replay agrees with the model") {
    for (std::uint32_t mss : {64u, 512u}) {
        const SimConfig c = make(3e-4, 3, mss, 300);
        const SimReport sim = simulate(c);
        const ModelReport model = evaluate(c.scenario);
        CAPTURE(mss);
        CHECK(z_score(sim, *model.total_bits) <= 3.0);
        CHECK(sim.mean_joules == doctest::Approx(sim.mean_total_bits * 0.66e-6).epsilon(1e-12));
    }
}

TEST_CASE("bit-level and frame-level fidelities agree") {
    FrameLayout fec;
    fec.alpha = 0.02;  // exercises the correction threshold
    for (const FrameLayout& layout : {FrameLayout{}, fec}) {
        SimConfig frame = make(5e-4, 2, 64, 150, layout);
        SimConfig bit = frame;
        bit.fidelity = Fidelity::BitLevel;
        bit.master_seed = 7;
        const SimReport a = simulate(frame);
        const SimReport b = simulate(bit);
        const double se = std::hypot(a.std_error, b.std_error);
        CHECK(std::abs(a.mean_total_bits - b.mean_total_bits) <= 3.0 * se);
        CHECK(z_score(b, *evaluate(bit.scenario).total_bits) <= 3.0);
    }
}

TEST_CASE("counter consistency") {
    const SimConfig c = make(8e-4, 3, 64, 30);
    const SimReport rep = simulate(c);
    const auto& k = rep.counters;
    CHECK(k.duplicates_suppressed <= k.partial_failures);
    CHECK(k.segment_retransmissions == k.segment_sends - c.replications * rep.segments_simulated);
    CHECK(k.link_failures <= k.link_attempts);
    CHECK(k.partial_failures > 0);
    CHECK(k.hop_drops > 0);
    CHECK(k.tcp_ack_losses > 0);
    CHECK(rep.std_error == doctest::Approx(rep.stddev / std::sqrt(30.0)).epsilon(1e-14));
    CHECK(rep.ci95 == doctest::Approx(1.959963984540054 * rep.std_error).epsilon(1e-14));
    CHECK_FALSE(rep.truncated);
}

TEST_CASE("single hop, single attempt: segment sends are geometric in P_s") {
    SimConfig c;
    c.scenario = PathScenario::uniform(1, 1e-3, 1, 64);
    c.replications = 50;
    c.threads = 1;
    const SimReport rep = simulate(c);
    const double q_data = std::pow(1.0 - 1e-3, 952);
    const double q_ack = std::pow(1.0 - 1e-3, 440);
    const double sends_per_segment =
        static_cast<double>(rep.counters.segment_sends) / static_cast<double>(c.replications * rep.segments);
    CHECK(sends_per_segment == doctest::Approx(1.0 / (q_data * q_ack)).epsilon(0.02));
    // With r = 1 a send is one data attempt, plus one ACK-frame attempt when the data got through.
    const auto& k = rep.counters;
    const std::uint64_t data_drops = k.hop_drops - k.tcp_ack_losses;
    CHECK(k.link_attempts == 2 * k.segment_sends - data_drops);
}

TEST_CASE("attempt cap truncates and flags") {
    SimConfig c = make(3e-3, 1, 512, 2);
    c.segment_cap = 2;
    c.attempt_cap = 5;
    const SimReport rep = simulate(c);
    CHECK(rep.truncated);
    CHECK(rep.counters.truncated_segments > 0);
}

TEST_CASE("regenerative estimator agrees with the model") {
    SimConfig c = make(3e-4, 3, 512, 200);
    c.estimator = Estimator::Regenerative;
    const SimReport rep = simulate(c);
    CHECK(rep.ber_scale == 1.0);
    CHECK(z_score(rep, *evaluate(c.scenario).total_bits) <= 3.0);
}

TEST_CASE("regenerative estimator reaches tiny success probabilities") {
    SimConfig c = make(8e-4, 1, 512, 150);
    c.estimator = Estimator::Regenerative;
    const ModelReport model = evaluate(c.scenario);
    REQUIRE(model.p_s < 1e-9);
    const SimReport rep = simulate(c);
    CHECK(rep.ber_scale < 1.0);
    CHECK(z_score(rep, *model.total_bits) <= 3.0);
    CHECK(rep.std_error < 0.1 * rep.mean_total_bits);
    c.threads = 3;
    CHECK(identical(rep, simulate(c)));
}

TEST_CASE("running stats merge matches sequential accumulation") {
    RunningStats all, left, right;
    for (int i = 0; i < 100; ++i) {
        const double x = std::sin(i * 0.7) * 1e6 + 3e6;
        all.add(x);
        (i < 37 ? left : right).add(x);
    }
    left.merge(right);
    CHECK(left.count == all.count);
    CHECK(left.mean == doctest::Approx(all.mean).epsilon(1e-14));
    CHECK(left.variance() == doctest::Approx(all.variance()).epsilon(1e-10));
}

TEST_CASE("configuration errors") {
    SimConfig c = make(3e-4, 3, 64, 0);
    CHECK_THROWS_AS(simulate(c), std::invalid_argument);
    c.replications = 1;
    c.segment_cap = 0;
    CHECK_THROWS_AS(simulate(c), std::invalid_argument);
}
