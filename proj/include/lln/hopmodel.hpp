#pragma once

#include <cstdint>
#include <optional>

namespace lln {

// P(X <= c) and P(X > c) for X ~ Binomial(n, p). Each tail is accurate on its
// own, so a tail of 1e-40 is not lost against the other one.
struct BinomialTails {
    double at_most = 1.0;
    double above = 0.0;
};

BinomialTails binomial_tails(std::uint32_t n, std::uint32_t c, double p);

// Probability that a D-bit frame has more than c bit errors at bit error rate ber.
double frame_error_prob(std::uint32_t d_bits, std::uint32_t c_bits, double ber);

struct HopParams {
    double ber = 3e-4;
    std::uint32_t max_attempts = 3;  // r

    void validate() const;

    friend bool operator==(const HopParams&, const HopParams&) = default;
};

// Outcome probabilities of one link-layer attempt.
struct AttemptProbs {
    double p_fail = 0.0;     // data frame uncorrectable
    double p_partial = 0.0;  // data received, link ACK corrupted
    double p_succ = 1.0;     // data and link ACK received
    double p_arrive = 1.0;   // p_partial + p_succ, kept separately for precision
};

AttemptProbs attempt_probs(std::uint32_t d_bits, std::uint32_t c_bits, std::uint32_t a_bits, double ber);

// Sizes seen by one hop: data frame D with c correctable bits, link ACK A.
struct HopFrame {
    std::uint32_t d_bits = 0;
    std::uint32_t c_bits = 0;
    std::uint32_t a_bits = 0;
};

struct HopModel {
    AttemptProbs probs;
    double f = 0.0;              // all r attempts failed
    double f_complement = 1.0;   // 1 - f
    std::optional<double> h_s;   // expected bits given the frame got through; empty when f == 1
    double h_f = 0.0;            // r * D

    bool degenerate() const { return !h_s.has_value(); }
};

HopModel hop_model(const HopFrame& frame, const HopParams& hop);

// Same model from attempt probabilities directly; p_arrive must equal p_partial + p_succ.
HopModel hop_model(const AttemptProbs& probs, std::uint32_t r, double d_bits, double a_bits);

}  // namespace lln
