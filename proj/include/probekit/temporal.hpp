#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "probekit/device_id.hpp"
#include "probekit/errors.hpp"
#include "probekit/probe.hpp"
#include "probekit/scan_instance.hpp"
#include "probekit/union_find.hpp"

namespace probekit {

// One burst of presence: a maximal run of a device's scan instances whose
// consecutive first_ts gaps stay within the clustering gap. The interval is
// padded so single-instance clusters still have extent.
struct AppearanceCluster {
    Timestamp start = 0;  // min member first_ts - pad
    Timestamp end = 0;    // max member first_ts + pad
    std::vector<std::size_t> member_instances;
};

struct TemporalProfile {
    std::size_t device_id = 0;  // index into the device list the profile was built from
    std::vector<AppearanceCluster> clusters;
};

// Which devices participate in temporal merging. Global MACs are already
// device-stable identifiers, so merging across them is off by default.
enum class MergeScope { RandomizedOnly, All };

struct TemporalConfig {
    double gap_s = 600.0;           // new appearance cluster when first_ts gap exceeds this
    double pad_s = 30.0;            // half-width added to each cluster interval
    double overlap_threshold = 0.5; // mean rank-paired interval overlap required to merge
    MergeScope scope = MergeScope::RandomizedOnly;
};

// Single-linkage clustering of a device's instance appearances on the time
// axis. Instances are keyed by first_ts; a gap greater than `gap_s` starts a
// new cluster. Intervals are [min - pad, max + pad].
inline TemporalProfile cluster_appearances(const DeviceCluster& device,
                                           std::span<const ScanInstance> instances,
                                           double gap_s, double pad_s) {
    if (gap_s <= 0.0) throw ConfigError("appearance gap must be positive");
    if (pad_s < 0.0) throw ConfigError("appearance pad must be non-negative");

    std::vector<std::size_t> ids = device.instance_ids;
    std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
        if (instances[a].first_ts != instances[b].first_ts)
            return instances[a].first_ts < instances[b].first_ts;
        return a < b;
    });

    const Timestamp gap = ts_from_seconds(gap_s);
    const Timestamp pad = ts_from_seconds(pad_s);

    TemporalProfile profile;
    for (std::size_t id : ids) {
        const Timestamp t = instances[id].first_ts;
        if (profile.clusters.empty() || t - (profile.clusters.back().end - pad) > gap) {
            AppearanceCluster c;
            c.start = t - pad;
            c.end = t + pad;
            c.member_instances.push_back(id);
            profile.clusters.push_back(std::move(c));
        } else {
            profile.clusters.back().end = t + pad;
            profile.clusters.back().member_instances.push_back(id);
        }
    }
    return profile;
}

// Mean over rank-paired clusters of interval intersection / interval union.
// Only meaningful for equal cluster counts; callers gate on that, so unequal
// counts are a logic error here. Two zero-width intervals score 1 when they
// coincide and 0 otherwise.
inline double profile_overlap(const TemporalProfile& a, const TemporalProfile& b) {
    if (a.clusters.size() != b.clusters.size())
        throw std::logic_error("profile_overlap requires equal cluster counts");
    if (a.clusters.empty()) return 0.0;

    double total = 0.0;
    for (std::size_t i = 0; i < a.clusters.size(); ++i) {
        const AppearanceCluster& x = a.clusters[i];
        const AppearanceCluster& y = b.clusters[i];
        const Timestamp inter_lo = std::max(x.start, y.start);
        const Timestamp inter_hi = std::min(x.end, y.end);
        const double inter = inter_hi > inter_lo ? ts_to_seconds(inter_hi - inter_lo) : 0.0;
        const double len_x = ts_to_seconds(x.end - x.start);
        const double len_y = ts_to_seconds(y.end - y.start);
        const double uni = len_x + len_y - inter;
        if (uni <= 0.0)
            total += (x.start == y.start) ? 1.0 : 0.0;
        else
            total += inter / uni;
    }
    return total / static_cast<double>(a.clusters.size());
}

namespace detail {
inline bool in_merge_scope(const DeviceCluster& d, MergeScope scope) {
    return scope == MergeScope::All || d.randomized;
}
}  // namespace detail

// Merges devices whose appearance patterns match: equal cluster counts and
// rank-paired overlap at or above the threshold. Rounds repeat to a fixed
// point; each merging round strictly reduces the device count, so the loop
// terminates. Merging is closure-based within a round (union-find), so the
// pair scan order cannot change the outcome. Devices outside the scope pass
// through untouched; the result is always ordered by first appearance.
inline std::vector<DeviceCluster> temporal_merge(std::span<const DeviceCluster> devices,
                                                 std::span<const ScanInstance> instances,
                                                 const TemporalConfig& cfg) {
    if (cfg.overlap_threshold <= 0.0 || cfg.overlap_threshold > 1.0)
        throw ConfigError("overlap threshold must be in (0, 1]");

    const auto by_first_appearance = [](const DeviceCluster& a, const DeviceCluster& b) {
        if (a.first_ts != b.first_ts) return a.first_ts < b.first_ts;
        return a.instance_ids.front() < b.instance_ids.front();
    };

    std::vector<DeviceCluster> current(devices.begin(), devices.end());
    std::sort(current.begin(), current.end(), by_first_appearance);
    for (;;) {
        std::vector<std::size_t> scoped;
        for (std::size_t i = 0; i < current.size(); ++i)
            if (detail::in_merge_scope(current[i], cfg.scope)) scoped.push_back(i);
        if (scoped.size() < 2) return current;

        std::vector<TemporalProfile> profiles(scoped.size());
        for (std::size_t k = 0; k < scoped.size(); ++k) {
            profiles[k] = cluster_appearances(current[scoped[k]], instances, cfg.gap_s, cfg.pad_s);
            profiles[k].device_id = scoped[k];
        }

        UnionFind uf(scoped.size());
        bool merged_any = false;
        for (std::size_t a = 0; a < scoped.size(); ++a) {
            for (std::size_t b = a + 1; b < scoped.size(); ++b) {
                if (profiles[a].clusters.size() != profiles[b].clusters.size()) continue;
                if (profile_overlap(profiles[a], profiles[b]) >= cfg.overlap_threshold)
                    merged_any |= uf.unite(a, b);
            }
        }
        if (!merged_any) return current;

        std::vector<DeviceCluster> next;
        for (auto& group : uf.components()) {
            if (group.size() == 1) continue;  // handled with the pass-through scan below
            std::vector<std::size_t> member_ids;
            for (std::size_t k : group) {
                const DeviceCluster& d = current[scoped[k]];
                member_ids.insert(member_ids.end(), d.instance_ids.begin(), d.instance_ids.end());
            }
            next.push_back(detail::make_cluster(instances, std::move(member_ids)));
        }
        std::vector<bool> absorbed(current.size(), false);
        for (auto& group : uf.components())
            if (group.size() > 1)
                for (std::size_t k : group) absorbed[scoped[k]] = true;
        for (std::size_t i = 0; i < current.size(); ++i)
            if (!absorbed[i]) next.push_back(std::move(current[i]));

        std::sort(next.begin(), next.end(), by_first_appearance);
        current = std::move(next);
    }
}

}  // namespace probekit
