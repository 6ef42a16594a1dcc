#include "lln/framing.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lln {

namespace {

std::uint32_t ceil_div(std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint32_t>((a + b - 1) / b);
}

// Header-only frame: the smallest frame the layout can ever emit.
FecFrame header_only_frame(const FrameLayout& layout) {
    return fec_frame(layout.ll_data_header_bits + layout.frag_header_bits, layout.alpha);
}

}  // namespace

void FrameLayout::validate() const {
    if (mtu_bits <= ll_data_header_bits + frag_header_bits)
        throw std::invalid_argument("layout: mtu_bits must exceed ll_data_header_bits + frag_header_bits");
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("layout: alpha must be a finite non-negative number");
    if (ll_ack_bits < 1)
        throw std::invalid_argument("layout: ll_ack_bits must be at least 1");
    for (const auto& [mss, m] : explicit_fragments) {
        if (mss == 0 || m == 0)
            throw std::invalid_argument("layout: explicit fragment entries must be positive");
    }
}

FrameLayout calibrated_layout() {
    FrameLayout layout;
    layout.frag_header_bits = 128;
    return layout;
}

FecFrame fec_frame(std::uint32_t k_bits, double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("fec_frame: alpha must be a finite non-negative number");
    const double expanded = static_cast<double>(k_bits) * (1.0 + alpha);
    // Snap values that are integral up to rounding noise (e.g. 800 * 1.1).
    const double nearest = std::round(expanded);
    const double d = std::abs(expanded - nearest) <= 1e-9 * expanded ? nearest : std::ceil(expanded);
    if (d > 4.0e9) throw std::invalid_argument("fec_frame: frame size overflows");
    FecFrame f;
    f.k_bits = k_bits;
    f.d_bits = static_cast<std::uint32_t>(d);
    f.c_bits = (f.d_bits - f.k_bits) / 2;
    return f;
}

std::uint64_t segment_bits(std::uint32_t mss_bytes, const FrameLayout& layout) {
    return 8ULL * mss_bytes + layout.tcp_header_bits + layout.ip_header_bits;
}

ResolvedFrames resolve_frames_with_count(std::uint32_t mss_bytes, std::uint32_t m,
                                         const FrameLayout& layout) {
    if (mss_bytes == 0) throw std::invalid_argument("resolve_frames: mss_bytes must be positive");
    if (m == 0) throw std::invalid_argument("resolve_frames: fragment count must be positive");
    layout.validate();

    const std::uint64_t payload = segment_bits(mss_bytes, layout);
    if (m > payload) throw std::invalid_argument("resolve_frames: more fragments than payload bits");

    if (header_only_frame(layout).d_bits > layout.mtu_bits)
        throw std::invalid_argument("resolve_frames: alpha makes a header-only frame exceed the MTU");

    ResolvedFrames out;
    out.m = m;
    const std::uint32_t k_data =
        ceil_div(payload, m) + layout.ll_data_header_bits + (m > 1 ? layout.frag_header_bits : 0);
    out.data = fec_frame(k_data, layout.alpha);
    out.ack = fec_frame(layout.tcp_header_bits + layout.ip_header_bits + layout.ll_data_header_bits,
                        layout.alpha);
    out.ll_ack_bits = layout.ll_ack_bits;
    return out;
}

ResolvedFrames resolve_frames(std::uint32_t mss_bytes, const FrameLayout& layout) {
    layout.validate();
    if (mss_bytes == 0) throw std::invalid_argument("resolve_frames: mss_bytes must be positive");

    if (layout.fragment_mode == FragmentMode::Explicit) {
        const auto it = layout.explicit_fragments.find(mss_bytes);
        if (it == layout.explicit_fragments.end())
            throw std::invalid_argument("resolve_frames: no explicit fragment count for MSS " +
                                        std::to_string(mss_bytes));
        return resolve_frames_with_count(mss_bytes, it->second, layout);
    }

    const std::uint64_t payload = segment_bits(mss_bytes, layout);
    if (header_only_frame(layout).d_bits > layout.mtu_bits)
        throw std::invalid_argument("resolve_frames: alpha makes a header-only frame exceed the MTU");

    // First fit is the smallest admissible fragment count.
    for (std::uint64_t m = 1; m <= payload; ++m) {
        const std::uint32_t k_data = ceil_div(payload, m) + layout.ll_data_header_bits +
                                     (m > 1 ? layout.frag_header_bits : 0);
        if (fec_frame(k_data, layout.alpha).d_bits <= layout.mtu_bits)
            return resolve_frames_with_count(mss_bytes, static_cast<std::uint32_t>(m), layout);
    }
    throw std::invalid_argument("resolve_frames: segment cannot be fragmented to fit the MTU");
}

}  // namespace lln
