#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace probekit {

// 48-bit link-layer address, network byte order: octets[0] is the first
// byte on the air and carries the two functional bits.
struct MacAddress {
    std::array<std::uint8_t, 6> octets{};

    auto operator<=>(const MacAddress&) const = default;
};

enum class MacClass { Global, Randomized, Group };

inline bool is_multicast(const MacAddress& mac) {
    return (mac.octets[0] & 0x01) != 0;
}

inline bool is_locally_administered(const MacAddress& mac) {
    return (mac.octets[0] & 0x02) != 0;
}

// Group wins over Randomized: the local bit is meaningless for group
// addresses and a multicast source is an anomaly either way.
inline MacClass classify_mac(const MacAddress& mac) {
    if (is_multicast(mac)) return MacClass::Group;
    if (is_locally_administered(mac)) return MacClass::Randomized;
    return MacClass::Global;
}

inline const char* to_string(MacClass c) {
    switch (c) {
        case MacClass::Global: return "global";
        case MacClass::Randomized: return "randomized";
        case MacClass::Group: return "group";
    }
    return "?";
}

inline std::string format_mac(const MacAddress& mac) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(17);
    for (int i = 0; i < 6; ++i) {
        if (i) out.push_back(':');
        out.push_back(digits[mac.octets[i] >> 4]);
        out.push_back(digits[mac.octets[i] & 0x0f]);
    }
    return out;
}

// Accepts aa:bb:cc:dd:ee:ff (any case). Returns nullopt on malformed input.
inline std::optional<MacAddress> parse_mac(std::string_view s) {
    if (s.size() != 17) return std::nullopt;
    MacAddress mac;
    for (int i = 0; i < 6; ++i) {
        auto nib = [](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            if (c >= 'A' && c <= 'F') return c - 'A' + 10;
            return -1;
        };
        int hi = nib(s[i * 3]);
        int lo = nib(s[i * 3 + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        if (i < 5 && s[i * 3 + 2] != ':') return std::nullopt;
        mac.octets[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return mac;
}

}  // namespace probekit
