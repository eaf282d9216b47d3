#pragma once

#include <compare>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "probekit/digest.hpp"
#include "probekit/probe.hpp"
#include "probekit/wps.hpp"

namespace probekit {

namespace field {
constexpr std::uint8_t kSupportedRates = 1 << 0;
constexpr std::uint8_t kExtRates = 1 << 1;
constexpr std::uint8_t kHtCap = 1 << 2;
constexpr std::uint8_t kVhtCap = 1 << 3;
constexpr std::uint8_t kExtCap = 1 << 4;
constexpr std::uint8_t kVendorSpecific = 1 << 5;
constexpr std::uint8_t kWps = 1 << 6;
}  // namespace field

struct Fingerprint {
    Sha512Digest digest{};
    std::uint8_t field_presence = 0;

    bool operator==(const Fingerprint& o) const { return digest == o.digest; }
    bool operator<(const Fingerprint& o) const { return digest < o.digest; }
};

inline bool is_stable_tag(std::uint8_t tag) {
    return tag == ie::kSupportedRates || tag == ie::kExtSupportedRates ||
           tag == ie::kHtCapabilities || tag == ie::kVhtCapabilities ||
           tag == ie::kExtCapabilities || tag == ie::kVendorSpecific;
}

// SHA-512 over the device-stable elements in on-air order, serialized as
// tag, length, payload. Inside the WPS vendor element the device-identity
// attributes are dropped first (UUID-E is matched separately, not folded
// into the model fingerprint), and the length byte covers the filtered
// payload so the digest survives anonymization.
inline Fingerprint fingerprint(const ProbeRequest& p) {
    Bytes canon;
    Fingerprint fp;
    for (const auto& el : p.elements) {
        switch (el.tag) {
            case ie::kSupportedRates: fp.field_presence |= field::kSupportedRates; break;
            case ie::kExtSupportedRates: fp.field_presence |= field::kExtRates; break;
            case ie::kHtCapabilities: fp.field_presence |= field::kHtCap; break;
            case ie::kVhtCapabilities: fp.field_presence |= field::kVhtCap; break;
            case ie::kExtCapabilities: fp.field_presence |= field::kExtCap; break;
            case ie::kVendorSpecific: fp.field_presence |= field::kVendorSpecific; break;
            default: break;
        }
        if (!is_stable_tag(el.tag)) continue;
        const Bytes* payload = &el.payload;
        std::optional<Bytes> filtered;
        if (el.tag == ie::kVendorSpecific && (filtered = wps_identity_filtered(el)))
            payload = &*filtered;
        canon.push_back(el.tag);
        canon.push_back(static_cast<std::uint8_t>(payload->size()));
        canon.insert(canon.end(), payload->begin(), payload->end());
    }
    if (p.wps) fp.field_presence |= field::kWps;
    fp.digest = sha512(canon);
    return fp;
}

inline std::string fingerprint_hex(const Fingerprint& fp) {
    return hex_encode(fp.digest.data(), fp.digest.size());
}

struct IeStatRow {
    std::string label;
    std::uint64_t count = 0;
    double percent = 0.0;
};

struct IeStatistics {
    std::uint64_t total_probes = 0;
    std::vector<IeStatRow> rows;
};

// Table of per-field occurrence counts: the six stable fields, a histogram
// of per-probe vendor-element counts (one row per observed count, so the
// histogram always sums to the vendor row), and WPS UUID-E presence.
inline IeStatistics ie_statistics(std::span<const ProbeRequest> probes) {
    IeStatistics stats;
    stats.total_probes = probes.size();
    std::uint64_t rates = 0, ext_rates = 0, ht = 0, vht = 0, ext_cap = 0, vendor = 0, uuid = 0;
    std::map<std::size_t, std::uint64_t> vendor_hist;
    for (const auto& p : probes) {
        std::size_t vendor_count = 0;
        bool has_rates = false, has_ext_rates = false, has_ht = false, has_vht = false, has_ext_cap = false;
        for (const auto& el : p.elements) {
            switch (el.tag) {
                case ie::kSupportedRates: has_rates = true; break;
                case ie::kExtSupportedRates: has_ext_rates = true; break;
                case ie::kHtCapabilities: has_ht = true; break;
                case ie::kVhtCapabilities: has_vht = true; break;
                case ie::kExtCapabilities: has_ext_cap = true; break;
                case ie::kVendorSpecific: ++vendor_count; break;
                default: break;
            }
        }
        rates += has_rates;
        ext_rates += has_ext_rates;
        ht += has_ht;
        vht += has_vht;
        ext_cap += has_ext_cap;
        if (vendor_count > 0) {
            ++vendor;
            ++vendor_hist[vendor_count];
        }
        if (p.wps && p.wps->uuid_e) ++uuid;
    }
    auto pct = [&](std::uint64_t c) {
        return stats.total_probes == 0 ? 0.0 : 100.0 * static_cast<double>(c) / static_cast<double>(stats.total_probes);
    };
    auto add = [&](std::string label, std::uint64_t c) {
        stats.rows.push_back({std::move(label), c, pct(c)});
    };
    add("Supported Rates", rates);
    add("Extended Supported Rates", ext_rates);
    add("HT Capabilities", ht);
    add("VHT Capabilities", vht);
    add("Extended Capabilities", ext_cap);
    add("Vendor Specific Elements", vendor);
    for (const auto& [k, c] : vendor_hist)
        add(std::to_string(k) + " Vendor Specific Element", c);
    add("WPS - UUID-E", uuid);
    return stats;
}

inline std::string format_ie_statistics_text(const IeStatistics& stats) {
    std::size_t width = 0;
    for (const auto& r : stats.rows) width = std::max(width, r.label.size());
    width = std::max(width, std::string("Total Collected Probe Requests").size());
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-*s  %12s  %8s\n", static_cast<int>(width), "Information Element",
                  "Included in Probes", "[%]");
    out += buf;
    for (const auto& r : stats.rows) {
        std::snprintf(buf, sizeof(buf), "%-*s  %18llu  %8.2f\n", static_cast<int>(width), r.label.c_str(),
                      static_cast<unsigned long long>(r.count), r.percent);
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "%-*s  %18llu\n", static_cast<int>(width), "Total Collected Probe Requests",
                  static_cast<unsigned long long>(stats.total_probes));
    out += buf;
    return out;
}

inline std::string format_ie_statistics_csv(const IeStatistics& stats) {
    std::string out = "field,count,percent\n";
    char buf[160];
    for (const auto& r : stats.rows) {
        std::snprintf(buf, sizeof(buf), "%s,%llu,%.2f\n", r.label.c_str(),
                      static_cast<unsigned long long>(r.count), r.percent);
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "Total Collected Probe Requests,%llu,\n",
                  static_cast<unsigned long long>(stats.total_probes));
    out += buf;
    return out;
}

}  // namespace probekit
