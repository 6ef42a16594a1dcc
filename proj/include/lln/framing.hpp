#pragma once

#include <cstdint>
#include <map>

namespace lln {

enum class FragmentMode {
    Explicit,  // fragment count looked up per MSS in FrameLayout::explicit_fragments
    Computed,  // smallest count whose FEC-expanded frame fits the MTU
};

// Link/adaptation/transport header sizes plus FEC redundancy. All sizes in bits.
// Defaults are the IEEE 802.15.4 / 6LoWPAN values used for the reference scenario.
struct FrameLayout {
    std::uint32_t mtu_bits = 127 * 8;
    std::uint32_t ll_data_header_bits = 120;
    std::uint32_t ll_ack_bits = 40;
    std::uint32_t frag_header_bits = 0;  // charged per fragment, only when m > 1
    std::uint32_t ip_header_bits = 160;
    std::uint32_t tcp_header_bits = 160;
    double alpha = 0.0;  // redundancy ratio (D - K) / K
    FragmentMode fragment_mode = FragmentMode::Explicit;
    std::map<std::uint32_t, std::uint32_t> explicit_fragments = {{64, 1}, {512, 8}};

    // Throws std::invalid_argument on a violated invariant.
    void validate() const;

    friend bool operator==(const FrameLayout&, const FrameLayout&) = default;
};

// Default layout with a 16-byte per-fragment header. This is the setting that
// brings the MSS=512 energy curves in line with the reference energy values.
FrameLayout calibrated_layout();

// One FEC-protected frame: K information bits expanded to D bits, c correctable.
struct FecFrame {
    std::uint32_t k_bits = 0;
    std::uint32_t d_bits = 0;
    std::uint32_t c_bits = 0;

    friend bool operator==(const FecFrame&, const FecFrame&) = default;
};

// D = ceil(K (1 + alpha)), c = floor((D - K) / 2).
FecFrame fec_frame(std::uint32_t k_bits, double alpha);

struct ResolvedFrames {
    std::uint32_t m = 1;
    FecFrame data;
    FecFrame ack;  // frame carrying the TCP acknowledgement
    std::uint32_t ll_ack_bits = 0;

    friend bool operator==(const ResolvedFrames&, const ResolvedFrames&) = default;
};

// TCP segment payload plus TCP/IP headers, in bits.
std::uint64_t segment_bits(std::uint32_t mss_bytes, const FrameLayout& layout);

ResolvedFrames resolve_frames(std::uint32_t mss_bytes, const FrameLayout& layout);

// Same accounting with the fragment count forced, bypassing the layout's mode.
ResolvedFrames resolve_frames_with_count(std::uint32_t mss_bytes, std::uint32_t m,
                                         const FrameLayout& layout);

}  // namespace lln
