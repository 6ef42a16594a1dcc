#include "lln/hopmodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lln {

namespace {

void check_ber(double ber) {
    if (!(ber >= 0.0 && ber < 1.0))
        throw std::invalid_argument("bit error rate must lie in [0, 1)");
}

double binomial_coefficient(std::uint32_t n, std::uint32_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (std::uint32_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return c;
}

}  // namespace

// Terms are generated by the ratio recurrence outward from the mode, in units
// of the modal probability, so nothing underflows near the bulk of the mass.
// Normalizing by the total replaces an explicit evaluation of pmf(mode).
BinomialTails binomial_tails(std::uint32_t n, std::uint32_t c, double p) {
    check_ber(p);
    if (p == 0.0 || c >= n) return {1.0, 0.0};

    const double odds = p / (1.0 - p);
    const auto mode = static_cast<std::uint32_t>(
        std::min<double>(n, std::floor((static_cast<double>(n) + 1.0) * p)));

    double lower = 0.0;
    double upper = 0.0;
    auto add = [&](std::uint32_t i, double t) { (i <= c ? lower : upper) += t; };

    add(mode, 1.0);
    double t = 1.0;
    for (std::uint32_t i = mode; i > 0; --i) {
        t *= static_cast<double>(i) / (static_cast<double>(n - i + 1) * odds);
        if (t == 0.0) break;
        add(i - 1, t);
    }
    t = 1.0;
    for (std::uint32_t i = mode; i < n; ++i) {
        t *= static_cast<double>(n - i) / static_cast<double>(i + 1) * odds;
        if (t == 0.0) break;
        add(i + 1, t);
    }
    const double total = lower + upper;
    return {lower / total, upper / total};
}

double frame_error_prob(std::uint32_t d_bits, std::uint32_t c_bits, double ber) {
    if (c_bits > d_bits) throw std::invalid_argument("frame_error_prob: c_bits exceeds d_bits");
    return binomial_tails(d_bits, c_bits, ber).above;
}

void HopParams::validate() const {
    check_ber(ber);
    if (max_attempts < 1) throw std::invalid_argument("hop: max_attempts must be at least 1");
}

AttemptProbs attempt_probs(std::uint32_t d_bits, std::uint32_t c_bits, std::uint32_t a_bits, double ber) {
    if (c_bits > d_bits) throw std::invalid_argument("attempt_probs: c_bits exceeds d_bits");
    if (a_bits < 1) throw std::invalid_argument("attempt_probs: a_bits must be at least 1");
    const BinomialTails data = binomial_tails(d_bits, c_bits, ber);
    const double log_ack_ok = static_cast<double>(a_bits) * std::log1p(-ber);
    AttemptProbs out;
    out.p_fail = data.above;
    out.p_arrive = data.at_most;
    out.p_partial = data.at_most * -std::expm1(log_ack_ok);
    out.p_succ = data.at_most * std::exp(log_ack_ok);
    return out;
}

HopModel hop_model(const AttemptProbs& p, std::uint32_t r, double d_bits, double a_bits) {
    if (r < 1) throw std::invalid_argument("hop: max_attempts must be at least 1");
    HopModel out;
    out.probs = p;
    const double rd = static_cast<double>(r);
    const double D = d_bits;
    const double A = a_bits;

    if (p.p_fail < 0.5) {
        out.f = std::pow(p.p_fail, rd);
        out.f_complement = 1.0 - out.f;
    } else {
        const double log_f = rd * std::log1p(-p.p_arrive);
        out.f = std::exp(log_f);
        out.f_complement = -std::expm1(log_f);
    }
    out.h_f = rd * D;
    if (out.f_complement <= 0.0) return out;

    // All r attempts used, i of them partial (data arrived, ACK lost).
    double sum = 0.0;
    for (std::uint32_t i = 1; i <= r; ++i) {
        sum += binomial_coefficient(r, i) * std::pow(p.p_partial, i) * std::pow(p.p_fail, r - i) *
               (rd * D + i * A);
    }
    // First success at attempt k, after i partials among the k - 1 earlier attempts.
    for (std::uint32_t k = 1; k <= r; ++k) {
        double inner = 0.0;
        for (std::uint32_t i = 0; i < k; ++i) {
            inner += binomial_coefficient(k - 1, i) * std::pow(p.p_partial, i) *
                     std::pow(p.p_fail, k - 1 - i) * (k * D + (i + 1) * A);
        }
        sum += p.p_succ * inner;
    }
    out.h_s = sum / out.f_complement;
    return out;
}

HopModel hop_model(const HopFrame& frame, const HopParams& hop) {
    hop.validate();
    return hop_model(attempt_probs(frame.d_bits, frame.c_bits, frame.a_bits, hop.ber), hop.max_attempts,
                     frame.d_bits, frame.a_bits);
}

}  // namespace lln
