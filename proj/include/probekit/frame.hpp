#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>

#include "probekit/probe.hpp"
#include "probekit/wps.hpp"

namespace probekit {

// Management frame, subtype probe request, protocol version 0.
constexpr std::uint8_t kProbeRequestFc0 = 0x40;
constexpr std::size_t kMacHeaderLen = 24;

inline bool is_probe_request_frame(std::span<const std::uint8_t> frame) {
    return !frame.empty() && frame[0] == kProbeRequestFc0;
}

struct DecodedFrame {
    ProbeRequest probe;
    bool truncated = false;  // IE list overran the frame end
};

// `frame` starts at the 802.11 MAC header (radiotap and FCS already
// stripped). nullopt when shorter than the header. Source MAC is
// Address 2; the sequence number is the upper 12 bits of the
// little-endian Sequence Control field.
inline std::optional<DecodedFrame> decode_frame(std::span<const std::uint8_t> frame, Timestamp ts) {
    if (frame.size() < kMacHeaderLen) return std::nullopt;
    DecodedFrame out;
    ProbeRequest& p = out.probe;
    p.timestamp = ts;
    std::copy(frame.begin() + 10, frame.begin() + 16, p.mac.octets.begin());
    std::uint16_t seq_ctl = static_cast<std::uint16_t>(frame[22] | frame[23] << 8);
    p.sequence_number = static_cast<std::uint16_t>(seq_ctl >> 4);

    std::size_t pos = kMacHeaderLen;
    bool saw_ssid = false;
    while (pos < frame.size()) {
        if (pos + 2 > frame.size() || pos + 2 + frame[pos + 1] > frame.size()) {
            out.truncated = true;
            break;
        }
        InformationElement el;
        el.tag = frame[pos];
        std::uint8_t len = frame[pos + 1];
        el.payload.assign(frame.begin() + pos + 2, frame.begin() + pos + 2 + len);
        pos += 2 + static_cast<std::size_t>(len);
        if (el.tag == ie::kSsid && !saw_ssid) {
            saw_ssid = true;
            if (!el.payload.empty()) p.ssid = el.payload;  // zero length = wildcard
        }
        if (!p.wps) {
            if (auto info = parse_wps(el)) p.wps = *info;
        }
        p.elements.push_back(std::move(el));
    }
    return out;
}

// Builds a broadcast probe request from the decoded fields. Inverse of
// decode_frame for frames this library generates.
inline Bytes encode_frame(const ProbeRequest& p) {
    Bytes frame;
    frame.reserve(kMacHeaderLen + 64);
    frame.push_back(kProbeRequestFc0);
    frame.push_back(0x00);
    frame.push_back(0x00);  // duration
    frame.push_back(0x00);
    for (int i = 0; i < 6; ++i) frame.push_back(0xff);  // Address 1: broadcast
    frame.insert(frame.end(), p.mac.octets.begin(), p.mac.octets.end());
    for (int i = 0; i < 6; ++i) frame.push_back(0xff);  // Address 3: broadcast BSSID
    std::uint16_t seq_ctl = static_cast<std::uint16_t>((p.sequence_number & 0x0fff) << 4);
    frame.push_back(static_cast<std::uint8_t>(seq_ctl & 0xff));
    frame.push_back(static_cast<std::uint8_t>(seq_ctl >> 8));
    for (const auto& el : p.elements) {
        if (el.payload.size() > 255)
            throw std::invalid_argument("information element payload exceeds 255 bytes");
        frame.push_back(el.tag);
        frame.push_back(static_cast<std::uint8_t>(el.payload.size()));
        frame.insert(frame.end(), el.payload.begin(), el.payload.end());
    }
    return frame;
}

struct RadiotapInfo {
    std::size_t header_len = 0;
    bool fcs_present = false;
};

// Reads just enough of the radiotap header to skip it and learn whether
// the frame carries an FCS (flags field, bit 0x10). No other radiotap
// field is consumed. nullopt on a malformed header.
inline std::optional<RadiotapInfo> parse_radiotap(std::span<const std::uint8_t> pkt) {
    if (pkt.size() < 8 || pkt[0] != 0) return std::nullopt;
    std::size_t len = static_cast<std::size_t>(pkt[2] | pkt[3] << 8);
    if (len < 8 || len > pkt.size()) return std::nullopt;

    // Present-flag words chain while bit 31 is set.
    std::size_t n_present = 0;
    std::uint32_t first_present = 0;
    while (true) {
        std::size_t off = 4 + n_present * 4;
        if (off + 4 > len) return std::nullopt;
        std::uint32_t word = static_cast<std::uint32_t>(pkt[off]) |
                             static_cast<std::uint32_t>(pkt[off + 1]) << 8 |
                             static_cast<std::uint32_t>(pkt[off + 2]) << 16 |
                             static_cast<std::uint32_t>(pkt[off + 3]) << 24;
        if (n_present == 0) first_present = word;
        ++n_present;
        if ((word & 0x80000000u) == 0) break;
        if (n_present > 32) return std::nullopt;
    }

    RadiotapInfo info;
    info.header_len = len;
    if (first_present & (1u << 1)) {  // flags field present
        std::size_t off = 4 + n_present * 4;
        if (first_present & (1u << 0)) {      // TSFT precedes it: u64, 8-aligned
            off = (off + 7) & ~std::size_t{7};
            off += 8;
        }
        if (off < len) info.fcs_present = (pkt[off] & 0x10) != 0;
    }
    return info;
}

}  // namespace probekit
