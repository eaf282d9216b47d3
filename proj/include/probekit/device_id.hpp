#pragma once

#include <algorithm>
#include <set>
#include <span>
#include <vector>

#include "probekit/scan_instance.hpp"
#include "probekit/union_find.hpp"

namespace probekit {

enum class SimilarityMetric {
    Jaccard,  // |a∩b| / |a∪b|
    Overlap,  // |a∩b| / min(|a|,|b|)
};

enum class Comparator { Strict, Inclusive };

struct SimilarityConfig {
    SimilarityMetric metric = SimilarityMetric::Jaccard;
    double threshold = 0.5;
    Comparator comparator = Comparator::Strict;
};

inline double ssid_similarity(const std::set<Bytes>& a, const std::set<Bytes>& b,
                              SimilarityMetric metric) {
    std::size_t inter = 0;
    for (const auto& s : a) inter += b.count(s);
    if (metric == SimilarityMetric::Jaccard) {
        std::size_t uni = a.size() + b.size() - inter;
        if (uni == 0) return 0.0;
        return static_cast<double>(inter) / static_cast<double>(uni);
    }
    std::size_t smaller = std::min(a.size(), b.size());
    if (smaller == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(smaller);
}

// Pairwise device test over scan instances: MAC equality decides alone,
// then UUID-E equality when both carry WPS (preempting the IE branch
// even when fingerprints and SSIDs agree), then fingerprint equality
// gated by SSID-set similarity against the threshold.
inline bool same_device(const ScanInstance& a, const ScanInstance& b,
                        const SimilarityConfig& cfg = {}) {
    if (a.mac == b.mac) return true;
    if (a.has_wps && b.has_wps) return a.uuid_e == b.uuid_e;
    if (a.fingerprint == b.fingerprint) {
        double p = ssid_similarity(a.ssids, b.ssids, cfg.metric);
        return cfg.comparator == Comparator::Strict ? p > cfg.threshold : p >= cfg.threshold;
    }
    return false;
}

// A set of scan instances attributed to one device. Members are indices
// into the instance list the cluster was built from.
struct DeviceCluster {
    std::vector<std::size_t> instance_ids;  // time-ordered
    std::set<MacAddress> macs;
    std::set<Bytes> ssid_union;
    std::set<Fingerprint> fingerprints;
    std::set<std::array<std::uint8_t, 16>> uuid_es;
    Timestamp first_ts = 0;
    Timestamp last_ts = 0;
    bool randomized = false;       // every member MAC classifies Randomized
    bool single_instance = false;  // kept in output, flagged so reports can discount them
};

namespace detail {
inline DeviceCluster make_cluster(std::span<const ScanInstance> instances,
                                  std::vector<std::size_t> member_ids) {
    std::sort(member_ids.begin(), member_ids.end(), [&](std::size_t x, std::size_t y) {
        if (instances[x].first_ts != instances[y].first_ts)
            return instances[x].first_ts < instances[y].first_ts;
        return x < y;
    });
    DeviceCluster dev;
    dev.instance_ids = std::move(member_ids);
    dev.randomized = true;
    for (std::size_t id : dev.instance_ids) {
        const ScanInstance& inst = instances[id];
        dev.macs.insert(inst.mac);
        dev.ssid_union.insert(inst.ssids.begin(), inst.ssids.end());
        dev.fingerprints.insert(inst.fingerprint);
        if (inst.uuid_e) dev.uuid_es.insert(*inst.uuid_e);
        if (classify_mac(inst.mac) != MacClass::Randomized) dev.randomized = false;
    }
    dev.first_ts = instances[dev.instance_ids.front()].first_ts;
    dev.last_ts = 0;
    for (std::size_t id : dev.instance_ids) dev.last_ts = std::max(dev.last_ts, instances[id].last_ts);
    dev.single_instance = dev.instance_ids.size() == 1;
    return dev;
}
}  // namespace detail

// Transitive closure of the pairwise test: union-find over all instance
// pairs, so the result is independent of input order. Clusters are
// ordered by earliest member timestamp; singletons are retained.
inline std::vector<DeviceCluster> cluster_devices(std::span<const ScanInstance> instances,
                                                  const SimilarityConfig& cfg = {}) {
    UnionFind uf(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i)
        for (std::size_t j = i + 1; j < instances.size(); ++j)
            if (same_device(instances[i], instances[j], cfg)) uf.unite(i, j);

    std::vector<DeviceCluster> devices;
    for (auto& members : uf.components())
        devices.push_back(detail::make_cluster(instances, std::move(members)));
    std::sort(devices.begin(), devices.end(), [](const DeviceCluster& a, const DeviceCluster& b) {
        if (a.first_ts != b.first_ts) return a.first_ts < b.first_ts;
        return a.instance_ids.front() < b.instance_ids.front();
    });
    return devices;
}

}  // namespace probekit
