#pragma once

#include <array>
#include <random>
#include <string_view>
#include <vector>

#include "probekit/capture.hpp"
#include "probekit/digest.hpp"
#include "probekit/errors.hpp"
#include "probekit/probe.hpp"
#include "probekit/wps.hpp"

namespace probekit {

// Run-scoped secret. Equal salts give equal mappings; the mapping itself
// is never written anywhere.
struct AnonymizationKey {
    std::array<std::uint8_t, 16> salt{};

    static AnonymizationKey from_hex(std::string_view hex) {
        if (hex.size() != 32)
            throw ConfigError("salt must be exactly 32 hex characters");
        AnonymizationKey key;
        Bytes raw = hex_decode(hex);
        std::copy(raw.begin(), raw.end(), key.salt.begin());
        return key;
    }

    static AnonymizationKey random() {
        AnonymizationKey key;
        std::random_device rd;
        for (auto& b : key.salt) b = static_cast<std::uint8_t>(rd());
        return key;
    }
};

constexpr std::size_t kSsidTokenLen = 12;
constexpr std::size_t kWpsTokenLen = 12;

// HMAC-SHA-256 truncated to out_len, with a per-field domain prefix so
// equal bytes in different fields map to unrelated tokens.
inline Bytes keyed_token(const AnonymizationKey& key, std::string_view domain, const std::uint8_t* data,
                         std::size_t len, std::size_t out_len) {
    Bytes msg(domain.begin(), domain.end());
    msg.insert(msg.end(), data, data + len);
    auto mac = hmac_sha256(key.salt.data(), key.salt.size(), msg);
    return Bytes(mac.begin(), mac.begin() + out_len);
}

// Replaces the MAC tail, SSID, UUID-E and the WPS identity strings with
// keyed tokens. OUI bytes, functional bits, sequence numbers, timestamps,
// IE tags and order, and every non-identifying payload stay untouched.
inline ProbeRequest anonymize_probe(const ProbeRequest& p, const AnonymizationKey& key) {
    ProbeRequest out = p;

    Bytes tail = keyed_token(key, "mac:", p.mac.octets.data() + 3, 3, 3);
    std::copy(tail.begin(), tail.end(), out.mac.octets.begin() + 3);

    if (out.ssid)
        out.ssid = keyed_token(key, "ssid:", out.ssid->data(), out.ssid->size(), kSsidTokenLen);

    std::optional<WpsInfo> repl;
    if (out.wps) {
        WpsInfo w;
        if (out.wps->uuid_e) {
            Bytes u = keyed_token(key, "uuid:", out.wps->uuid_e->data(), 16, 16);
            std::array<std::uint8_t, 16> arr;
            std::copy(u.begin(), u.end(), arr.begin());
            w.uuid_e = arr;
        }
        auto tokenize = [&](const std::optional<Bytes>& v, std::string_view domain) -> std::optional<Bytes> {
            if (!v) return std::nullopt;
            return keyed_token(key, domain, v->data(), v->size(), kWpsTokenLen);
        };
        w.device_name = tokenize(out.wps->device_name, "wps-name:");
        w.manufacturer = tokenize(out.wps->manufacturer, "wps-manufacturer:");
        w.model = tokenize(out.wps->model, "wps-model:");
        repl = w;
        out.wps = w;
    }

    for (auto& el : out.elements) {
        if (el.tag == ie::kSsid && !el.payload.empty())
            el.payload = keyed_token(key, "ssid:", el.payload.data(), el.payload.size(), kSsidTokenLen);
        if (repl && is_wps_element(el)) {
            if (auto rewritten = wps_rewrite_identity(el, *repl))
                el.payload = std::move(*rewritten);
        }
    }
    return out;
}

// Order- and count-preserving map over the stream. Raw frame bytes are
// dropped: they contain the identifying fields verbatim; pcap output is
// re-encoded from the anonymized probes instead.
inline std::vector<CaptureRecord> anonymize_capture(std::vector<CaptureRecord> records,
                                                    const AnonymizationKey& key) {
    for (auto& rec : records) {
        rec.probe = anonymize_probe(rec.probe, key);
        rec.raw_frame.reset();
    }
    return records;
}

}  // namespace probekit
