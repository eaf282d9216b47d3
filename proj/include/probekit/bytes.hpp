#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace probekit {

using Bytes = std::vector<std::uint8_t>;

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline std::string hex_encode(const std::uint8_t* data, std::size_t len) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (std::size_t i = 0; i < len; ++i) {
        out.push_back(digits[data[i] >> 4]);
        out.push_back(digits[data[i] & 0x0f]);
    }
    return out;
}

inline std::string hex_encode(const Bytes& data) {
    return hex_encode(data.data(), data.size());
}

inline int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

inline Bytes hex_decode(std::string_view hex) {
    if (hex.size() % 2 != 0)
        throw std::invalid_argument("hex string has odd length");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0)
            throw std::invalid_argument("invalid hex digit");
        out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
    }
    return out;
}

// Lossy text rendering for display only; SSIDs and WPS strings stay raw bytes
// everywhere else.
inline std::string printable(const Bytes& data) {
    std::string out;
    out.reserve(data.size());
    for (std::uint8_t b : data) {
        if (b >= 0x20 && b < 0x7f)
            out.push_back(static_cast<char>(b));
        else
            out += "\\x" + hex_encode(&b, 1);
    }
    return out;
}

}  // namespace probekit
