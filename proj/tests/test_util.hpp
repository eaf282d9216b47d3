#pragma once

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "probekit/probekit.hpp"

namespace pktest {

using namespace probekit;

inline MacAddress mac(const std::string& s) {
    auto m = parse_mac(s);
    REQUIRE(m.has_value());
    return *m;
}

inline Bytes bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline std::array<std::uint8_t, 16> uuid16(std::string_view hex) {
    const Bytes raw = hex_decode(hex);
    REQUIRE(raw.size() == 16);
    std::array<std::uint8_t, 16> u{};
    std::copy(raw.begin(), raw.end(), u.begin());
    return u;
}

// A decoded probe with the default rate elements, so fingerprints agree
// across probes unless extra elements differ.
inline ProbeRequest make_probe(double ts_s, const std::string& mac_str, std::uint16_t sn,
                               std::optional<std::string> ssid = std::nullopt,
                               std::vector<InformationElement> extra = {}) {
    ProbeRequest p;
    p.timestamp = ts_from_seconds(ts_s);
    p.mac = mac(mac_str);
    p.sequence_number = sn;
    if (ssid) {
        p.ssid = bytes(*ssid);
        p.elements.push_back({ie::kSsid, bytes(*ssid)});
    } else {
        p.elements.push_back({ie::kSsid, {}});
    }
    p.elements.push_back({ie::kSupportedRates, {0x82, 0x84, 0x8b, 0x96}});
    p.elements.push_back({ie::kExtSupportedRates, {0x0c, 0x12, 0x18, 0x24}});
    for (auto& e : extra) p.elements.push_back(std::move(e));
    return p;
}

inline ProbeRequest with_wps(ProbeRequest p, std::optional<std::string> uuid_hex,
                             std::optional<std::string> name = std::nullopt) {
    WpsInfo info;
    if (uuid_hex) info.uuid_e = uuid16(*uuid_hex);
    if (name) info.device_name = bytes(*name);
    p.elements.push_back({ie::kVendorSpecific, build_wps_payload(info)});
    p.wps = info;
    return p;
}

// A bare instance for device-clustering tests; the fingerprint digest is
// keyed off one byte so distinct keys never collide.
inline ScanInstance make_instance(const std::string& mac_str, double t0_s, double t1_s,
                                  std::vector<std::string> ssids, std::uint8_t fp_key,
                                  bool has_wps = false,
                                  std::optional<std::string> uuid_hex = std::nullopt) {
    ScanInstance inst;
    inst.mac = mac(mac_str);
    inst.first_ts = ts_from_seconds(t0_s);
    inst.last_ts = ts_from_seconds(t1_s);
    for (const auto& s : ssids) inst.ssids.insert(bytes(s));
    inst.fingerprint.digest.fill(0);
    inst.fingerprint.digest[0] = fp_key;
    inst.has_wps = has_wps;
    if (uuid_hex) inst.uuid_e = uuid16(*uuid_hex);
    inst.probe_indices = {0};
    return inst;
}

inline std::filesystem::path fresh_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("probekit-test-" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace pktest
