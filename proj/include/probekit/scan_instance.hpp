#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "probekit/fingerprint.hpp"
#include "probekit/probe.hpp"

namespace probekit {

struct InstanceConfig {
    // Max gap between consecutive member probes. 0 disables the bound,
    // which is the literal pseudocode (no time term at all).
    double max_gap_s = 10.0;
    // Modular 12-bit sequence comparison. Off = literal plain-integer
    // comparison, which splits bursts straddling 4095 -> 0.
    bool wraparound = true;
};

// probe1.sn < probe2.sn < probe1.sn + 5, with the wraparound variant
// phrased as modular distance in (0, 5).
inline bool sn_in_window(std::uint16_t sn1, std::uint16_t sn2, bool wraparound) {
    if (wraparound) {
        std::uint16_t d = static_cast<std::uint16_t>((sn2 - sn1) & 0x0fff);
        return d > 0 && d < 5;
    }
    return sn1 < sn2 && sn2 < sn1 + 5;
}

namespace detail {
inline std::optional<std::array<std::uint8_t, 16>> probe_uuid(const ProbeRequest& p) {
    return p.wps ? p.wps->uuid_e : std::nullopt;
}

inline bool same_instance_keyed(const ProbeRequest& p1, const Fingerprint& fp1, const ProbeRequest& p2,
                                const Fingerprint& fp2, const InstanceConfig& cfg) {
    if (p1.mac != p2.mac) return false;
    if (p1.wps && p2.wps) return probe_uuid(p1) == probe_uuid(p2);
    if (fp1 == fp2) return sn_in_window(p1.sequence_number, p2.sequence_number, cfg.wraparound);
    return false;
}
}  // namespace detail

// Pairwise scan-instance test: MAC gate, then UUID-E equality when both
// probes carry WPS (deciding alone, no sequence check), then IE
// fingerprint equality gated by the sequence window. p1 precedes p2.
inline bool same_instance(const ProbeRequest& p1, const ProbeRequest& p2,
                          const InstanceConfig& cfg = {}) {
    return detail::same_instance_keyed(p1, fingerprint(p1), p2, fingerprint(p2), cfg);
}

// A maximal burst of probes attributed to one device in one scan.
struct ScanInstance {
    std::vector<ProbeRequest> probes;        // time-ordered, non-empty
    std::vector<std::size_t> probe_indices;  // positions in the input stream
    MacAddress mac;
    Timestamp first_ts = 0;
    Timestamp last_ts = 0;
    std::set<Bytes> ssids;  // union over members; wildcards contribute nothing
    Fingerprint fingerprint;
    bool has_wps = false;
    std::optional<std::array<std::uint8_t, 16>> uuid_e;
};

// Streaming fold: each probe extends the most recent open instance with
// its MAC when the pairwise test against that instance's latest probe
// holds and the gap bound is met, else it opens a new instance. Input is
// sorted by timestamp first if it is not already (stable, so capture
// order breaks ties). Every probe lands in exactly one instance.
inline std::vector<ScanInstance> group_instances(std::span<const ProbeRequest> probes,
                                                 const InstanceConfig& cfg = {}) {
    std::vector<std::size_t> order(probes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    bool sorted = std::is_sorted(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return probes[a].timestamp < probes[b].timestamp;
    });
    if (!sorted)
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return probes[a].timestamp < probes[b].timestamp;
        });

    const Timestamp max_gap_us = static_cast<Timestamp>(cfg.max_gap_s * 1e6);

    std::vector<ScanInstance> instances;
    struct OpenState {
        std::size_t instance;
        Fingerprint last_fp;
    };
    std::map<MacAddress, OpenState> open;

    for (std::size_t idx : order) {
        const ProbeRequest& p = probes[idx];
        Fingerprint fp = fingerprint(p);
        auto it = open.find(p.mac);
        if (it != open.end()) {
            ScanInstance& inst = instances[it->second.instance];
            bool gap_ok = cfg.max_gap_s <= 0.0 || p.timestamp - inst.last_ts <= max_gap_us;
            if (gap_ok && detail::same_instance_keyed(inst.probes.back(), it->second.last_fp, p, fp, cfg)) {
                inst.probes.push_back(p);
                inst.probe_indices.push_back(idx);
                inst.last_ts = p.timestamp;
                if (p.ssid) inst.ssids.insert(*p.ssid);
                if (p.wps) inst.has_wps = true;
                if (!inst.uuid_e) inst.uuid_e = detail::probe_uuid(p);
                it->second.last_fp = fp;
                continue;
            }
        }
        ScanInstance inst;
        inst.probes.push_back(p);
        inst.probe_indices.push_back(idx);
        inst.mac = p.mac;
        inst.first_ts = inst.last_ts = p.timestamp;
        if (p.ssid) inst.ssids.insert(*p.ssid);
        inst.fingerprint = fp;
        inst.has_wps = p.wps.has_value();
        inst.uuid_e = detail::probe_uuid(p);
        instances.push_back(std::move(inst));
        open[p.mac] = OpenState{instances.size() - 1, fp};
    }
    return instances;
}

}  // namespace probekit
