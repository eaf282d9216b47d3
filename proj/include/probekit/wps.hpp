#pragma once

#include <cstdint>
#include <optional>

#include "probekit/probe.hpp"

namespace probekit {

inline bool is_wps_element(const InformationElement& el) {
    return el.tag == ie::kVendorSpecific && el.payload.size() >= 4 &&
           el.payload[0] == wps::kOui[0] && el.payload[1] == wps::kOui[1] &&
           el.payload[2] == wps::kOui[2] && el.payload[3] == wps::kOuiType;
}

inline bool is_wps_identity_attr(std::uint16_t type) {
    return type == wps::kAttrUuidE || type == wps::kAttrDeviceName ||
           type == wps::kAttrManufacturer || type == wps::kAttrModelName;
}

// Walks the big-endian TLVs after the OUI+type prefix. Returns false on
// overrun, in which case the element is treated as opaque vendor data.
template <typename Fn>
inline bool walk_wps_attrs(const Bytes& payload, Fn&& fn) {
    std::size_t pos = 4;
    while (pos < payload.size()) {
        if (pos + 4 > payload.size()) return false;
        std::uint16_t type = static_cast<std::uint16_t>(payload[pos] << 8 | payload[pos + 1]);
        std::uint16_t len = static_cast<std::uint16_t>(payload[pos + 2] << 8 | payload[pos + 3]);
        if (pos + 4 + len > payload.size()) return false;
        fn(type, payload.data() + pos + 4, len);
        pos += 4 + static_cast<std::size_t>(len);
    }
    return true;
}

// nullopt when the element is not WPS or its TLVs are malformed.
inline std::optional<WpsInfo> parse_wps(const InformationElement& el) {
    if (!is_wps_element(el)) return std::nullopt;
    WpsInfo info;
    bool ok = walk_wps_attrs(el.payload, [&](std::uint16_t type, const std::uint8_t* val, std::uint16_t len) {
        switch (type) {
            case wps::kAttrUuidE:
                if (len == 16) {
                    std::array<std::uint8_t, 16> u;
                    std::copy(val, val + 16, u.begin());
                    info.uuid_e = u;
                }
                break;
            case wps::kAttrDeviceName: info.device_name = Bytes(val, val + len); break;
            case wps::kAttrManufacturer: info.manufacturer = Bytes(val, val + len); break;
            case wps::kAttrModelName: info.model = Bytes(val, val + len); break;
            default: break;
        }
    });
    if (!ok) return std::nullopt;
    return info;
}

// Payload with the device-identity attributes (UUID-E, name, manufacturer,
// model) removed. nullopt when not a well-formed WPS element; callers then
// use the raw payload.
inline std::optional<Bytes> wps_identity_filtered(const InformationElement& el) {
    if (!is_wps_element(el)) return std::nullopt;
    Bytes out(el.payload.begin(), el.payload.begin() + 4);
    bool ok = walk_wps_attrs(el.payload, [&](std::uint16_t type, const std::uint8_t* val, std::uint16_t len) {
        if (is_wps_identity_attr(type)) return;
        out.push_back(static_cast<std::uint8_t>(type >> 8));
        out.push_back(static_cast<std::uint8_t>(type & 0xff));
        out.push_back(static_cast<std::uint8_t>(len >> 8));
        out.push_back(static_cast<std::uint8_t>(len & 0xff));
        out.insert(out.end(), val, val + len);
    });
    if (!ok) return std::nullopt;
    return out;
}

namespace detail {
inline void append_wps_attr(Bytes& out, std::uint16_t type, const std::uint8_t* val, std::size_t len) {
    out.push_back(static_cast<std::uint8_t>(type >> 8));
    out.push_back(static_cast<std::uint8_t>(type & 0xff));
    out.push_back(static_cast<std::uint8_t>(len >> 8));
    out.push_back(static_cast<std::uint8_t>(len & 0xff));
    out.insert(out.end(), val, val + len);
}
}  // namespace detail

// Rewrites the identity attribute values, keeping every other attribute
// verbatim. An identity attribute with no replacement in `repl` is copied
// unchanged. nullopt on malformed TLVs.
inline std::optional<Bytes> wps_rewrite_identity(const InformationElement& el, const WpsInfo& repl) {
    if (!is_wps_element(el)) return std::nullopt;
    Bytes out(el.payload.begin(), el.payload.begin() + 4);
    bool ok = walk_wps_attrs(el.payload, [&](std::uint16_t type, const std::uint8_t* val, std::uint16_t len) {
        switch (type) {
            case wps::kAttrUuidE:
                if (len == 16 && repl.uuid_e) {
                    detail::append_wps_attr(out, type, repl.uuid_e->data(), repl.uuid_e->size());
                    return;
                }
                break;
            case wps::kAttrDeviceName:
                if (repl.device_name) {
                    detail::append_wps_attr(out, type, repl.device_name->data(), repl.device_name->size());
                    return;
                }
                break;
            case wps::kAttrManufacturer:
                if (repl.manufacturer) {
                    detail::append_wps_attr(out, type, repl.manufacturer->data(), repl.manufacturer->size());
                    return;
                }
                break;
            case wps::kAttrModelName:
                if (repl.model) {
                    detail::append_wps_attr(out, type, repl.model->data(), repl.model->size());
                    return;
                }
                break;
            default: break;
        }
        detail::append_wps_attr(out, type, val, len);
    });
    if (!ok) return std::nullopt;
    return out;
}

// Builds a fresh WPS element payload (version attr first, then the identity
// attributes that are present). Used by the trace generator.
inline Bytes build_wps_payload(const WpsInfo& info) {
    Bytes out = {wps::kOui[0], wps::kOui[1], wps::kOui[2], wps::kOuiType};
    const std::uint8_t version = 0x10;
    detail::append_wps_attr(out, wps::kAttrVersion, &version, 1);
    if (info.uuid_e) detail::append_wps_attr(out, wps::kAttrUuidE, info.uuid_e->data(), 16);
    if (info.device_name)
        detail::append_wps_attr(out, wps::kAttrDeviceName, info.device_name->data(), info.device_name->size());
    if (info.manufacturer)
        detail::append_wps_attr(out, wps::kAttrManufacturer, info.manufacturer->data(), info.manufacturer->size());
    if (info.model)
        detail::append_wps_attr(out, wps::kAttrModelName, info.model->data(), info.model->size());
    return out;
}

}  // namespace probekit
