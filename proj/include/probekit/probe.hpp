#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include "probekit/bytes.hpp"
#include "probekit/mac.hpp"

namespace probekit {

// Microseconds since the Unix epoch. pcap packet headers are (u32 sec,
// u32 usec); every such timestamp fits exactly, and the conversion to and
// from float seconds (records format) is exact to the microsecond.
using Timestamp = std::int64_t;

inline double ts_to_seconds(Timestamp t) {
    return static_cast<double>(t) / 1e6;
}

inline Timestamp ts_from_seconds(double s) {
    return static_cast<Timestamp>(std::llround(s * 1e6));
}

namespace ie {
// 802.11 element IDs used by the pipeline.
constexpr std::uint8_t kSsid = 0;
constexpr std::uint8_t kSupportedRates = 1;
constexpr std::uint8_t kHtCapabilities = 45;
constexpr std::uint8_t kExtSupportedRates = 50;
constexpr std::uint8_t kExtCapabilities = 127;
constexpr std::uint8_t kVhtCapabilities = 191;
constexpr std::uint8_t kVendorSpecific = 221;
}  // namespace ie

namespace wps {
// WPS vendor element: OUI 00:50:f2, OUI type 4, then big-endian TLVs.
constexpr std::uint8_t kOui[3] = {0x00, 0x50, 0xf2};
constexpr std::uint8_t kOuiType = 0x04;
constexpr std::uint16_t kAttrDeviceName = 0x1011;
constexpr std::uint16_t kAttrManufacturer = 0x1021;
constexpr std::uint16_t kAttrModelName = 0x1023;
constexpr std::uint16_t kAttrUuidE = 0x1047;
constexpr std::uint16_t kAttrVersion = 0x104a;
}  // namespace wps

struct InformationElement {
    std::uint8_t tag = 0;
    Bytes payload;  // at most 255 bytes, enforced by encode/decode

    auto operator<=>(const InformationElement&) const = default;
};

struct WpsInfo {
    std::optional<std::array<std::uint8_t, 16>> uuid_e;
    std::optional<Bytes> device_name;
    std::optional<Bytes> manufacturer;
    std::optional<Bytes> model;

    auto operator<=>(const WpsInfo&) const = default;
};

// One decoded probe request. SSID stays raw bytes (may be non-UTF8);
// absent ssid means a wildcard probe, which is distinct from an empty
// byte string. `elements` preserves on-air order and includes the SSID
// element, so re-encoding is lossless.
struct ProbeRequest {
    Timestamp timestamp = 0;
    MacAddress mac;
    std::uint16_t sequence_number = 0;  // 12-bit counter, < 4096
    std::optional<Bytes> ssid;
    std::vector<InformationElement> elements;
    std::optional<WpsInfo> wps;

    auto operator<=>(const ProbeRequest&) const = default;
};

inline bool is_wildcard(const ProbeRequest& p) {
    return !p.ssid.has_value();
}

}  // namespace probekit
