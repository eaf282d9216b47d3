#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "probekit/bytes.hpp"
#include "probekit/capture.hpp"
#include "probekit/errors.hpp"
#include "probekit/mac.hpp"
#include "probekit/probe.hpp"
#include "probekit/records.hpp"
#include "probekit/wps.hpp"

namespace probekit {

// How often a synthetic device rotates its source MAC.
enum class Randomization { None, PerSession, PerScan, PerProbe };

// Which preferred-network-list entries each scan burst probes for.
// Full sends the whole list every scan; RotatingSubset sends a k-sized
// window that advances each scan; WildcardOnly never discloses the list.
enum class PnlPolicy { Full, RotatingSubset, WildcardOnly };

inline std::string to_string(Randomization r) {
    switch (r) {
        case Randomization::None: return "none";
        case Randomization::PerSession: return "per-session";
        case Randomization::PerScan: return "per-scan";
        case Randomization::PerProbe: return "per-probe";
    }
    return "none";
}

inline std::string to_string(PnlPolicy p) {
    switch (p) {
        case PnlPolicy::Full: return "full";
        case PnlPolicy::RotatingSubset: return "rotating-subset";
        case PnlPolicy::WildcardOnly: return "wildcard-only";
    }
    return "wildcard-only";
}

inline Randomization randomization_from_string(std::string_view s) {
    if (s == "none") return Randomization::None;
    if (s == "per-session") return Randomization::PerSession;
    if (s == "per-scan") return Randomization::PerScan;
    if (s == "per-probe") return Randomization::PerProbe;
    throw ConfigError("unknown randomization '" + std::string(s) +
                      "' (expected none|per-session|per-scan|per-probe)");
}

inline PnlPolicy pnl_policy_from_string(std::string_view s) {
    if (s == "full") return PnlPolicy::Full;
    if (s == "rotating-subset") return PnlPolicy::RotatingSubset;
    if (s == "wildcard-only") return PnlPolicy::WildcardOnly;
    throw ConfigError("unknown pnl_policy '" + std::string(s) +
                      "' (expected full|rotating-subset|wildcard-only)");
}

// One presence window. The device scans at scan_period intervals from
// start_s while strictly before end_s.
struct SynthSession {
    double start_s = 0.0;
    double end_s = 0.0;
};

inline std::vector<InformationElement> default_ie_template() {
    return {
        {ie::kSupportedRates, {0x82, 0x84, 0x8b, 0x96}},
        {ie::kExtSupportedRates, {0x0c, 0x12, 0x18, 0x24, 0x30, 0x48, 0x60, 0x6c}},
    };
}

struct DeviceProfile {
    std::string id;
    Randomization randomization = Randomization::PerScan;
    double scan_period_s = 60.0;
    std::size_t burst_size = 4;
    std::vector<SynthSession> sessions = {{0.0, 600.0}};
    std::vector<Bytes> pnl;
    PnlPolicy pnl_policy = PnlPolicy::WildcardOnly;
    std::size_t pnl_subset_size = 1;  // the k of RotatingSubset
    std::vector<InformationElement> ie_template = default_ie_template();  // stable elements, on-air order
    std::optional<WpsInfo> wps;
    std::optional<std::uint16_t> initial_sn;  // drawn from the seed when absent
};

struct Scenario {
    std::uint64_t seed = 0;
    std::vector<DeviceProfile> devices;
};

// True origin of one emitted probe. `scan` is the device-global burst
// ordinal (it keeps counting across sessions).
struct ProbeLabel {
    std::size_t device = 0;
    std::size_t session = 0;
    std::size_t scan = 0;
};

struct GroundTruth {
    std::vector<std::string> device_ids;  // profile ids, index-aligned with ProbeLabel::device
    std::vector<ProbeLabel> labels;       // one per probe, in capture order
    std::size_t expected_instances = 0;
    std::size_t expected_devices = 0;
};

struct SynthResult {
    std::vector<CaptureRecord> records;
    GroundTruth truth;
};

// Intra-burst gap model: 98% of gaps fall strictly under 65 ms (lognormal
// body, median 15 ms), the rest spread uniformly up to 2 s.
constexpr double kSub65Fraction = 0.98;
constexpr Timestamp kBurstGapCapUs = 65'000;
constexpr Timestamp kBurstGapTailMaxUs = 2'000'000;

namespace detail {

// mt19937_64 output is standardized, and these samplers avoid
// std::*_distribution on purpose: their algorithms are
// implementation-defined, which would break cross-toolchain determinism.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(rng() % span);
}

inline double normal01(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

inline Timestamp intra_burst_gap_us(std::mt19937_64& rng) {
    if (uniform01(rng) < kSub65Fraction) {
        for (;;) {
            const double g = std::exp(std::log(0.015) + 0.6 * normal01(rng));
            const Timestamp us = ts_from_seconds(g);
            if (us >= 1 && us < kBurstGapCapUs) return us;
        }
    }
    return uniform_int(rng, kBurstGapCapUs, kBurstGapTailMaxUs);
}

// Draws a fresh MAC, retrying on the (vanishingly rare) collision so
// distinct draws never alias two devices together.
inline MacAddress draw_mac(std::mt19937_64& rng, bool randomized, std::set<MacAddress>& used) {
    for (;;) {
        const std::uint64_t bits = rng();
        MacAddress m;
        for (int i = 0; i < 6; ++i) m.octets[i] = static_cast<std::uint8_t>(bits >> (8 * i));
        if (randomized)
            m.octets[0] = static_cast<std::uint8_t>((m.octets[0] | 0x02) & ~0x01);
        else
            m.octets[0] = static_cast<std::uint8_t>(m.octets[0] & ~0x03);
        if (used.insert(m).second) return m;
    }
}

// SSID slots for burst number `scan` (nullopt = wildcard probe). A burst
// grows past burst_size when the policy needs more directed slots.
inline std::vector<std::optional<Bytes>> burst_ssids(const DeviceProfile& p, std::size_t scan) {
    std::vector<std::optional<Bytes>> slots;
    std::size_t directed = 0;
    if (p.pnl_policy == PnlPolicy::Full) directed = p.pnl.size();
    if (p.pnl_policy == PnlPolicy::RotatingSubset) directed = p.pnl_subset_size;
    const std::size_t n = std::max(p.burst_size, directed);
    slots.reserve(n);
    for (std::size_t i = 0; i < directed; ++i) {
        const std::size_t idx = p.pnl_policy == PnlPolicy::Full
                                    ? i
                                    : (scan * p.pnl_subset_size + i) % p.pnl.size();
        slots.emplace_back(p.pnl[idx]);
    }
    while (slots.size() < n) slots.emplace_back(std::nullopt);
    return slots;
}

}  // namespace detail

inline void validate_scenario(const Scenario& scenario) {
    std::set<std::string> ids;
    for (const DeviceProfile& p : scenario.devices) {
        const std::string who = "device '" + p.id + "'";
        if (p.id.empty()) throw ConfigError("device with empty id");
        if (!ids.insert(p.id).second) throw ConfigError("duplicate " + who);
        if (p.scan_period_s <= 0.0) throw ConfigError(who + ": scan_period_s must be positive");
        if (p.burst_size < 1) throw ConfigError(who + ": burst_size must be at least 1");
        if (p.sessions.empty()) throw ConfigError(who + ": needs at least one session");
        for (std::size_t i = 0; i < p.sessions.size(); ++i) {
            if (!(p.sessions[i].start_s < p.sessions[i].end_s))
                throw ConfigError(who + ": sessions[" + std::to_string(i) + "] start must precede end");
            if (i > 0 && p.sessions[i].start_s < p.sessions[i - 1].end_s)
                throw ConfigError(who + ": sessions overlap or are out of order at index " +
                                  std::to_string(i));
        }
        for (const Bytes& ssid : p.pnl)
            if (ssid.size() > 32) throw ConfigError(who + ": pnl entry longer than 32 bytes");
        if (p.pnl_policy != PnlPolicy::WildcardOnly && p.pnl.empty())
            throw ConfigError(who + ": pnl_policy " + to_string(p.pnl_policy) +
                              " requires a non-empty pnl");
        if (p.pnl_policy == PnlPolicy::RotatingSubset &&
            (p.pnl_subset_size < 1 || p.pnl_subset_size > p.pnl.size()))
            throw ConfigError(who + ": pnl_subset_size must be in [1, pnl size]");
        for (const InformationElement& el : p.ie_template) {
            if (el.tag == ie::kSsid) throw ConfigError(who + ": ie template must not contain an SSID element");
            if (el.payload.size() > 255) throw ConfigError(who + ": ie payload longer than 255 bytes");
        }
        if (p.initial_sn && *p.initial_sn > 0x0fff)
            throw ConfigError(who + ": initial_sn must be below 4096");
    }
}

// Deterministic synthesis: every draw comes from one seeded engine, devices
// are generated in profile order, then the streams are merged by a stable
// (timestamp, device, scan) sort.
inline SynthResult generate(const Scenario& scenario) {
    validate_scenario(scenario);

    struct Pending {
        ProbeRequest probe;
        ProbeLabel label;
    };
    std::vector<Pending> pending;
    std::mt19937_64 rng(scenario.seed);
    std::set<MacAddress> used_macs;

    SynthResult out;
    out.truth.expected_devices = scenario.devices.size();

    for (std::size_t d = 0; d < scenario.devices.size(); ++d) {
        const DeviceProfile& prof = scenario.devices[d];
        out.truth.device_ids.push_back(prof.id);

        std::uint16_t sn = prof.initial_sn
                               ? *prof.initial_sn
                               : static_cast<std::uint16_t>(detail::uniform_int(rng, 0, 0x0fff));
        MacAddress device_mac{};
        if (prof.randomization == Randomization::None)
            device_mac = detail::draw_mac(rng, false, used_macs);

        std::optional<Bytes> wps_payload;
        if (prof.wps) wps_payload = build_wps_payload(*prof.wps);

        const Timestamp period = ts_from_seconds(prof.scan_period_s);
        std::size_t scan_ordinal = 0;
        std::size_t device_probes = 0;

        for (std::size_t s = 0; s < prof.sessions.size(); ++s) {
            MacAddress session_mac{};
            if (prof.randomization == Randomization::PerSession)
                session_mac = detail::draw_mac(rng, true, used_macs);

            const Timestamp departure = ts_from_seconds(prof.sessions[s].end_s);
            for (Timestamp t = ts_from_seconds(prof.sessions[s].start_s); t < departure;
                 t += period) {
                MacAddress scan_mac{};
                if (prof.randomization == Randomization::PerScan)
                    scan_mac = detail::draw_mac(rng, true, used_macs);

                Timestamp pt = t;
                const auto slots = detail::burst_ssids(prof, scan_ordinal);
                for (std::size_t i = 0; i < slots.size(); ++i) {
                    if (i > 0) pt += detail::intra_burst_gap_us(rng);

                    Pending rec;
                    rec.label = {d, s, scan_ordinal};
                    ProbeRequest& p = rec.probe;
                    p.timestamp = pt;
                    switch (prof.randomization) {
                        case Randomization::None: p.mac = device_mac; break;
                        case Randomization::PerSession: p.mac = session_mac; break;
                        case Randomization::PerScan: p.mac = scan_mac; break;
                        case Randomization::PerProbe:
                            p.mac = detail::draw_mac(rng, true, used_macs);
                            break;
                    }
                    p.sequence_number = sn;
                    sn = static_cast<std::uint16_t>((sn + 1) & 0x0fff);
                    p.ssid = slots[i];
                    p.elements.push_back({ie::kSsid, slots[i] ? *slots[i] : Bytes{}});
                    p.elements.insert(p.elements.end(), prof.ie_template.begin(),
                                      prof.ie_template.end());
                    if (wps_payload) {
                        p.elements.push_back({ie::kVendorSpecific, *wps_payload});
                        p.wps = prof.wps;
                    }
                    pending.push_back(std::move(rec));
                    ++device_probes;
                }
                sn = static_cast<std::uint16_t>((sn + detail::uniform_int(rng, 5, 200)) & 0x0fff);
                ++scan_ordinal;
            }
        }

        // A fresh MAC per probe makes every probe its own scan instance;
        // otherwise each burst is one (scan periods sit far outside the
        // instance gap in any sane scenario).
        out.truth.expected_instances +=
            prof.randomization == Randomization::PerProbe ? device_probes : scan_ordinal;
    }

    std::stable_sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
        if (a.probe.timestamp != b.probe.timestamp) return a.probe.timestamp < b.probe.timestamp;
        if (a.label.device != b.label.device) return a.label.device < b.label.device;
        return a.label.scan < b.label.scan;
    });

    out.records.reserve(pending.size());
    out.truth.labels.reserve(pending.size());
    for (Pending& rec : pending) {
        out.records.push_back(CaptureRecord{std::move(rec.probe), std::nullopt});
        out.truth.labels.push_back(rec.label);
    }
    return out;
}

// --- scenario file format -------------------------------------------------
//
// JSON object:
//   {"seed": 7, "devices": [{
//       "id": "phone-a", "randomization": "per-scan", "scan_period_s": 60,
//       "burst_size": 4, "sessions": [[0, 360], [14400, 14760]],
//       "pnl": ["HomeNet"], "pnl_policy": "full", "pnl_subset_size": 1,
//       "ie": {"supported_rates": "82848b96", "ext_supported_rates": null,
//              "ht_capabilities": "...", "vht_capabilities": "...",
//              "ext_capabilities": "...", "vendor_elements": ["0017f2..."]},
//       "wps": {"uuid_e": "<32 hex>", "name": "...", "manufacturer": "...",
//               "model": "..."},
//       "initial_sn": 100}]}
//
// Unknown keys are rejected with their path. Inside "ie", a missing rates
// key falls back to the default template while null drops the element.

namespace detail {

[[noreturn]] inline void scenario_error(const std::string& path, const std::string& what) {
    throw ConfigError("scenario: " + path + ": " + what);
}

inline void reject_unknown_keys(const Json& obj, const std::vector<std::string_view>& allowed,
                                const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            scenario_error(path, "unknown key '" + it.key() + "'");
}

inline Bytes scenario_hex(const Json& v, const std::string& path) {
    if (!v.is_string()) scenario_error(path, "expected a hex string");
    try {
        return hex_decode(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
        scenario_error(path, e.what());
    }
}

inline double scenario_number(const Json& v, const std::string& path) {
    if (!v.is_number()) scenario_error(path, "expected a number");
    return v.get<double>();
}

inline std::uint64_t scenario_uint(const Json& v, const std::string& path) {
    if (!v.is_number_unsigned()) scenario_error(path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

inline std::string scenario_string(const Json& v, const std::string& path) {
    if (!v.is_string()) scenario_error(path, "expected a string");
    return v.get<std::string>();
}

inline DeviceProfile profile_from_json(const Json& j, const std::string& path) {
    if (!j.is_object()) scenario_error(path, "expected an object");
    reject_unknown_keys(j,
                        {"id", "randomization", "scan_period_s", "burst_size", "sessions", "pnl",
                         "pnl_policy", "pnl_subset_size", "ie", "wps", "initial_sn"},
                        path);

    DeviceProfile p;
    if (!j.contains("id")) scenario_error(path, "missing required key 'id'");
    p.id = scenario_string(j.at("id"), path + ".id");
    if (j.contains("randomization"))
        p.randomization =
            randomization_from_string(scenario_string(j.at("randomization"), path + ".randomization"));
    if (j.contains("scan_period_s")) {
        p.scan_period_s = scenario_number(j.at("scan_period_s"), path + ".scan_period_s");
        if (p.scan_period_s <= 0.0) scenario_error(path + ".scan_period_s", "must be positive");
    }
    if (j.contains("burst_size")) {
        p.burst_size = scenario_uint(j.at("burst_size"), path + ".burst_size");
        if (p.burst_size < 1) scenario_error(path + ".burst_size", "must be at least 1");
    }
    if (j.contains("sessions")) {
        const Json& arr = j.at("sessions");
        if (!arr.is_array()) scenario_error(path + ".sessions", "expected an array of [start, end]");
        p.sessions.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string sp = path + ".sessions[" + std::to_string(i) + "]";
            const Json& pair = arr[i];
            if (!pair.is_array() || pair.size() != 2) scenario_error(sp, "expected [start, end]");
            p.sessions.push_back(
                {scenario_number(pair[0], sp + "[0]"), scenario_number(pair[1], sp + "[1]")});
        }
    }
    if (j.contains("pnl")) {
        const Json& arr = j.at("pnl");
        if (!arr.is_array()) scenario_error(path + ".pnl", "expected an array of strings");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string s =
                scenario_string(arr[i], path + ".pnl[" + std::to_string(i) + "]");
            p.pnl.emplace_back(s.begin(), s.end());
        }
    }
    if (j.contains("pnl_policy"))
        p.pnl_policy = pnl_policy_from_string(scenario_string(j.at("pnl_policy"), path + ".pnl_policy"));
    if (j.contains("pnl_subset_size"))
        p.pnl_subset_size = scenario_uint(j.at("pnl_subset_size"), path + ".pnl_subset_size");
    if (j.contains("ie")) {
        const Json& ieobj = j.at("ie");
        const std::string ip = path + ".ie";
        if (!ieobj.is_object()) scenario_error(ip, "expected an object");
        reject_unknown_keys(ieobj,
                            {"supported_rates", "ext_supported_rates", "ht_capabilities",
                             "vht_capabilities", "ext_capabilities", "vendor_elements"},
                            ip);
        p.ie_template.clear();
        const auto add_field = [&](const char* key, std::uint8_t tag, bool default_present) {
            const std::string kp = ip + "." + key;
            if (!ieobj.contains(key)) {
                if (default_present) {
                    for (const InformationElement& el : default_ie_template())
                        if (el.tag == tag) p.ie_template.push_back(el);
                }
                return;
            }
            if (ieobj.at(key).is_null()) return;
            p.ie_template.push_back({tag, scenario_hex(ieobj.at(key), kp)});
        };
        add_field("supported_rates", ie::kSupportedRates, true);
        add_field("ext_supported_rates", ie::kExtSupportedRates, true);
        add_field("ht_capabilities", ie::kHtCapabilities, false);
        add_field("ext_capabilities", ie::kExtCapabilities, false);
        add_field("vht_capabilities", ie::kVhtCapabilities, false);
        if (ieobj.contains("vendor_elements")) {
            const Json& varr = ieobj.at("vendor_elements");
            const std::string vp = ip + ".vendor_elements";
            if (!varr.is_array()) scenario_error(vp, "expected an array of hex strings");
            if (varr.size() > 5) scenario_error(vp, "at most 5 vendor elements");
            for (std::size_t i = 0; i < varr.size(); ++i)
                p.ie_template.push_back({ie::kVendorSpecific,
                                         scenario_hex(varr[i], vp + "[" + std::to_string(i) + "]")});
        }
    }
    if (j.contains("wps") && !j.at("wps").is_null()) {
        const Json& w = j.at("wps");
        const std::string wp = path + ".wps";
        if (!w.is_object()) scenario_error(wp, "expected an object or null");
        reject_unknown_keys(w, {"uuid_e", "name", "manufacturer", "model"}, wp);
        WpsInfo info;
        if (w.contains("uuid_e")) {
            const Bytes raw = scenario_hex(w.at("uuid_e"), wp + ".uuid_e");
            if (raw.size() != 16) scenario_error(wp + ".uuid_e", "expected 16 bytes (32 hex digits)");
            std::array<std::uint8_t, 16> u{};
            std::copy(raw.begin(), raw.end(), u.begin());
            info.uuid_e = u;
        }
        const auto text = [&](const char* key) -> std::optional<Bytes> {
            if (!w.contains(key)) return std::nullopt;
            const std::string s = scenario_string(w.at(key), wp + "." + key);
            return Bytes(s.begin(), s.end());
        };
        info.device_name = text("name");
        info.manufacturer = text("manufacturer");
        info.model = text("model");
        p.wps = std::move(info);
    }
    if (j.contains("initial_sn")) {
        const std::uint64_t v = scenario_uint(j.at("initial_sn"), path + ".initial_sn");
        if (v > 0x0fff) scenario_error(path + ".initial_sn", "must be below 4096");
        p.initial_sn = static_cast<std::uint16_t>(v);
    }
    return p;
}

}  // namespace detail

inline Scenario scenario_from_json(const Json& j) {
    if (!j.is_object()) detail::scenario_error("$", "expected a top-level object");
    detail::reject_unknown_keys(j, {"seed", "devices"}, "$");
    Scenario sc;
    if (j.contains("seed")) sc.seed = detail::scenario_uint(j.at("seed"), "$.seed");
    if (!j.contains("devices")) detail::scenario_error("$", "missing required key 'devices'");
    const Json& arr = j.at("devices");
    if (!arr.is_array()) detail::scenario_error("$.devices", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
        sc.devices.push_back(
            detail::profile_from_json(arr[i], "$.devices[" + std::to_string(i) + "]"));
    validate_scenario(sc);
    return sc;
}

inline Scenario scenario_from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open scenario file: " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("scenario: not valid JSON: " + std::string(e.what()));
    }
    return scenario_from_json(j);
}

// Ground-truth sidecar: one scenario header line, then one line per probe
// in capture order.
inline void write_ground_truth(std::ostream& os, std::uint64_t seed, const GroundTruth& truth) {
    Json header;
    header["type"] = "scenario";
    header["seed"] = seed;
    header["probe_count"] = truth.labels.size();
    header["expected_instances"] = truth.expected_instances;
    header["expected_devices"] = truth.expected_devices;
    header["devices"] = truth.device_ids;
    os << header.dump() << '\n';
    for (std::size_t i = 0; i < truth.labels.size(); ++i) {
        const ProbeLabel& l = truth.labels[i];
        Json line;
        line["type"] = "probe";
        line["index"] = i;
        line["device"] = truth.device_ids[l.device];
        line["session"] = l.session;
        line["scan"] = l.scan;
        os << line.dump() << '\n';
    }
    if (!os) throw IoError("short write on ground-truth output");
}

}  // namespace probekit
