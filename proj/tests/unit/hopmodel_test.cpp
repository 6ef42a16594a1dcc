#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lln/hopmodel.hpp"
#include "oracles.hpp"

using namespace lln;

namespace {

bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

TEST_CASE("frame error probability: trivial cases") {
    CHECK(frame_error_prob(952, 0, 0.0) == 0.0);
    CHECK(frame_error_prob(10, 10, 0.5) == 0.0);
}

TEST_CASE("frame error probability: reference values") {
    // 40-digit reference values.
    CHECK(rel_close(frame_error_prob(952, 0, 3e-4), 0.24846902161530752, 1e-13));
    CHECK(rel_close(frame_error_prob(8, 1, 0.1), 0.18689527, 1e-7));
    CHECK(rel_close(frame_error_prob(8, 1, 0.1), 1.0 - (std::pow(0.9, 8) + 8 * 0.1 * std::pow(0.9, 7)), 1e-13));
    CHECK(rel_close(binomial_tails(1000, 5, 1e-3).above, 5.8807010176297839e-4, 1e-11));
    CHECK(rel_close(binomial_tails(2000, 10, 1e-6).above, 4.982167885066627e-38, 1e-11));
    CHECK(rel_close(binomial_tails(1600, 400, 0.1).above, 7.9436381055582986e-67, 1e-10));
    CHECK(rel_close(binomial_tails(952, 0, 1e-7).above, 9.5195473383343999e-5, 1e-11));
    CHECK(rel_close(binomial_tails(800, 4, 8e-4).above, 5.2219489192129779e-4, 1e-11));
}

TEST_CASE("binomial tails agree with direct summation in extended precision") {
    for (std::uint32_t n : {1u, 8u, 40u, 440u, 952u, 2000u}) {
        for (std::uint32_t c : {0u, 1u, 3u, 20u}) {
            if (c > n) continue;
            for (double p : {1e-6, 1e-4, 3e-4, 8e-3, 0.1, 0.5, 0.9}) {
                const BinomialTails t = binomial_tails(n, c, p);
                const long double lo = oracle::lower_tail(n, c, p);
                const long double hi = oracle::upper_tail(n, c, p);
                CAPTURE(n);
                CAPTURE(c);
                CAPTURE(p);
                if (lo > 1e-280L) CHECK(rel_close(t.at_most, static_cast<double>(lo), 1e-10));
                if (hi > 1e-280L) CHECK(rel_close(t.above, static_cast<double>(hi), 1e-10));
                CHECK(std::abs(t.at_most + t.above - 1.0) < 1e-14);
            }
        }
    }
}

TEST_CASE("attempt probabilities") {
    const AttemptProbs z = attempt_probs(952, 0, 40, 0.0);
    CHECK(z.p_fail == 0.0);
    CHECK(z.p_partial == 0.0);
    CHECK(z.p_succ == 1.0);

    const AttemptProbs all = attempt_probs(100, 100, 40, 0.01);
    CHECK(all.p_fail == 0.0);
    CHECK(rel_close(all.p_partial, 1.0 - std::pow(0.99, 40), 1e-13));
    CHECK(rel_close(all.p_succ, std::pow(0.99, 40), 1e-13));

    const AttemptProbs ref = attempt_probs(952, 0, 40, 3e-4);
    CHECK(rel_close(ref.p_fail, 0.24846902161530752, 1e-13));
    CHECK(rel_close(ref.p_partial, 0.0089658141892094954, 1e-12));
    CHECK(rel_close(ref.p_succ, 0.74256516419548299, 1e-13));
}

TEST_CASE("probability closure") {
    for (std::uint32_t d : {40u, 672u, 952u, 1904u})
        for (std::uint32_t c : {0u, 2u, 39u})
            for (std::uint32_t a : {1u, 40u})
                for (double b : {0.0, 1e-7, 1e-5, 3e-4, 8e-4, 1e-2, 0.2, 0.7}) {
                    const AttemptProbs p = attempt_probs(d, c, a, b);
                    CHECK(std::abs(p.p_fail + p.p_partial + p.p_succ - 1.0) <= 1e-12);
                    CHECK(p.p_fail >= 0.0);
                    CHECK(p.p_partial >= 0.0);
                    CHECK(p.p_succ >= 0.0);
                }
}

TEST_CASE("frame error probability is monotone in d and c") {
    for (double b : {1e-5, 3e-4, 1e-2}) {
        double prev = 0.0;
        for (std::uint32_t d = 50; d <= 2000; d += 50) {
            const double p = frame_error_prob(d, 3, b);
            CHECK(p >= prev);
            prev = p;
        }
        prev = 1.0;
        for (std::uint32_t c = 0; c <= 40; ++c) {
            const double p = frame_error_prob(952, c, b);
            CHECK(p <= prev);
            prev = p;
        }
    }
}

TEST_CASE("hop model: trivial cases") {
    const HopFrame fr{952, 0, 40};
    for (std::uint32_t r : {1u, 3u, 7u}) {
        const HopModel h = hop_model(fr, HopParams{0.0, r});
        CHECK(h.f == 0.0);
        REQUIRE(h.h_s);
        CHECK(*h.h_s == doctest::Approx(992.0).epsilon(1e-15));
        CHECK(h.h_f == r * 952.0);
    }
    const HopModel one = hop_model(fr, HopParams{3e-4, 1});
    CHECK(one.f == one.probs.p_fail);
    CHECK(*one.h_s == doctest::Approx(992.0).epsilon(1e-13));
}

TEST_CASE("hop model matches enumeration of attempt sequences") {
    const double D = 800.0, A = 40.0;
    for (int r = 1; r <= 4; ++r) {
        for (double pf : {0.05, 0.2, 0.4, 0.6, 0.85}) {
            for (double pp_frac : {0.0, 0.1, 0.3, 0.6, 0.95}) {
                // Hop model takes BER, so build the frame probabilities directly.
                const double pp = (1.0 - pf) * pp_frac;
                const double ps = 1.0 - pf - pp;
                const auto ref = oracle::enumerate_hop(pf, pp, ps, r, D, A);

                const HopModel h = hop_model(AttemptProbs{pf, pp, ps, pp + ps}, r, D, A);
                CAPTURE(r);
                CAPTURE(pf);
                CAPTURE(pp);
                CHECK(rel_close(h.f_complement, ref.arrive, 1e-12));
                REQUIRE(h.h_s);
                CHECK(rel_close(*h.h_s, ref.bits_given_arrival, 1e-10));
            }
        }
    }
}

TEST_CASE("hop model h_s matches enumeration for BER-derived probabilities") {
    for (std::uint32_t r = 1; r <= 4; ++r) {
        for (double b : {1e-5, 3e-4, 1e-3, 5e-3}) {
            const HopFrame fr{672, 3, 40};
            const HopModel h = hop_model(fr, HopParams{b, r});
            const auto ref = oracle::enumerate_hop(h.probs.p_fail, h.probs.p_partial, h.probs.p_succ, r, 672, 40);
            REQUIRE(h.h_s);
            CHECK(rel_close(*h.h_s, ref.bits_given_arrival, 1e-10));
            CHECK(*h.h_s >= 672.0);
            CHECK(*h.h_s <= r * (672.0 + 40.0) * (1.0 + 1e-12));
            CHECK(h.f == doctest::Approx(std::pow(h.probs.p_fail, r)).epsilon(1e-12));
        }
    }
}

TEST_CASE("f decreases and h_f increases in r") {
    const HopFrame fr{952, 0, 40};
    double prev_f = 2.0, prev_hf = 0.0;
    for (std::uint32_t r = 1; r <= 10; ++r) {
        const HopModel h = hop_model(fr, HopParams{5e-4, r});
        CHECK(h.f < prev_f);
        CHECK(h.h_f > prev_hf);
        prev_f = h.f;
        prev_hf = h.h_f;
    }
}

TEST_CASE("hop failure keeps precision near one") {
    const HopModel h = hop_model(HopFrame{2000, 0, 40}, HopParams{0.05, 2});
    CHECK(h.f > 0.999999);
    CHECK(h.f_complement > 0.0);
    // 1 - (1 - x)^2 with x = 0.95^2000.
    const long double x = std::pow(0.95L, 2000);
    CHECK(rel_close(h.f_complement, static_cast<double>(2.0L * x - x * x), 1e-9));
    REQUIRE(h.h_s);
}

TEST_CASE("degenerate hop is flagged") {
    const HopModel h = hop_model(HopFrame{1016, 0, 40}, HopParams{0.9, 1});
    CHECK(h.degenerate());
    CHECK(h.f == 1.0);
    CHECK(h.h_f == 1016.0);
}

TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(hop_model(HopFrame{10, 0, 40}, HopParams{1.0, 3}), std::invalid_argument);
    CHECK_THROWS_AS(hop_model(HopFrame{10, 0, 40}, HopParams{1e-3, 0}), std::invalid_argument);
    CHECK_THROWS_AS(frame_error_prob(5, 6, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(attempt_probs(5, 0, 0, 0.1), std::invalid_argument);
}
