#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "probekit/anonymize.hpp"
#include "probekit/artifacts.hpp"
#include "probekit/capture.hpp"
#include "probekit/device_id.hpp"
#include "probekit/errors.hpp"
#include "probekit/scan_instance.hpp"
#include "probekit/temporal.hpp"

namespace probekit {

inline std::string to_string(SimilarityMetric m) {
    return m == SimilarityMetric::Jaccard ? "jaccard" : "overlap";
}

inline std::string to_string(Comparator c) {
    return c == Comparator::Strict ? "strict" : "inclusive";
}

inline std::string to_string(MergeScope s) {
    return s == MergeScope::RandomizedOnly ? "randomized-only" : "all";
}

inline SimilarityMetric similarity_metric_from_string(std::string_view s) {
    if (s == "jaccard") return SimilarityMetric::Jaccard;
    if (s == "overlap") return SimilarityMetric::Overlap;
    throw ConfigError("unknown similarity metric '" + std::string(s) + "' (expected jaccard|overlap)");
}

inline MergeScope merge_scope_from_string(std::string_view s) {
    if (s == "randomized-only" || s == "randomized") return MergeScope::RandomizedOnly;
    if (s == "all") return MergeScope::All;
    throw ConfigError("unknown merge scope '" + std::string(s) + "' (expected randomized|all)");
}

struct AnalysisConfig {
    std::optional<AnonymizationKey> anonymize_key;  // when set, the capture is anonymized first
    InstanceConfig instance;
    SimilarityConfig similarity;
    TemporalConfig temporal;
};

// One timeline lane: a device's padded appearance intervals, in seconds.
struct TimelineEntry {
    std::size_t device_id = 0;
    bool randomized = false;
    std::size_t instance_count = 0;
    std::vector<std::pair<double, double>> clusters;
};

struct AnalysisReport {
    std::size_t probe_count = 0;  // unicast probes entering the pipeline
    std::size_t group_probes_excluded = 0;
    std::size_t undecodable_frames = 0;
    std::size_t skipped_other_frames = 0;
    std::size_t truncated_ie_frames = 0;
    std::size_t instance_count = 0;
    std::size_t single_probe_instances = 0;
    std::size_t device_count_pre_merge = 0;
    std::size_t device_count_post_merge = 0;
    std::size_t global_mac_devices = 0;       // at least one globally administered MAC
    std::size_t randomized_devices_pre = 0;   // every MAC randomized
    std::size_t randomized_devices_post = 0;
    std::size_t single_instance_devices_pre = 0;
    std::size_t single_instance_devices_post = 0;
    std::vector<TimelineEntry> timelines_pre;
    std::vector<TimelineEntry> timelines_post;
    Json parameters;
};

struct AnalysisResult {
    AnalysisReport report;
    std::vector<ScanInstance> instances;
    std::vector<DeviceCluster> devices_pre;
    std::vector<DeviceCluster> devices_post;
};

// The salt never leaves the process: the echo only records that one was used.
inline Json parameters_json(const AnalysisConfig& cfg) {
    Json p;
    p["anonymize"] = cfg.anonymize_key.has_value();
    p["salt"] = cfg.anonymize_key ? Json("(redacted)") : Json(nullptr);
    p["instance_gap_s"] = cfg.instance.max_gap_s;
    p["sn_wraparound"] = cfg.instance.wraparound;
    p["ssid_metric"] = to_string(cfg.similarity.metric);
    p["ssid_threshold"] = cfg.similarity.threshold;
    p["ssid_comparator"] = to_string(cfg.similarity.comparator);
    p["merge_gap_s"] = cfg.temporal.gap_s;
    p["merge_pad_s"] = cfg.temporal.pad_s;
    p["merge_overlap"] = cfg.temporal.overlap_threshold;
    p["merge_scope"] = to_string(cfg.temporal.scope);
    return p;
}

// Drops group-addressed sources (a probe request is unicast-sourced; group
// bits there mean a mangled frame) and groups the rest. probe_indices are
// remapped to positions in the original capture.
inline std::vector<ScanInstance> instances_from_capture(const std::vector<CaptureRecord>& records,
                                                        const InstanceConfig& cfg,
                                                        std::size_t* group_excluded = nullptr) {
    std::vector<ProbeRequest> probes;
    std::vector<std::size_t> source_index;
    probes.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (classify_mac(records[i].probe.mac) == MacClass::Group) {
            if (group_excluded) ++*group_excluded;
            continue;
        }
        probes.push_back(records[i].probe);
        source_index.push_back(i);
    }
    std::vector<ScanInstance> instances = group_instances(probes, cfg);
    for (ScanInstance& inst : instances)
        for (std::size_t& pi : inst.probe_indices) pi = source_index[pi];
    return instances;
}

namespace detail {
inline std::vector<TimelineEntry> build_timelines(std::span<const DeviceCluster> devices,
                                                  std::span<const ScanInstance> instances,
                                                  const TemporalConfig& cfg) {
    std::vector<TimelineEntry> out;
    out.reserve(devices.size());
    for (std::size_t d = 0; d < devices.size(); ++d) {
        TimelineEntry e;
        e.device_id = d;
        e.randomized = devices[d].randomized;
        e.instance_count = devices[d].instance_ids.size();
        const TemporalProfile prof = cluster_appearances(devices[d], instances, cfg.gap_s, cfg.pad_s);
        for (const AppearanceCluster& c : prof.clusters)
            e.clusters.emplace_back(ts_to_seconds(c.start), ts_to_seconds(c.end));
        out.push_back(std::move(e));
    }
    return out;
}
}  // namespace detail

inline AnalysisResult analyze(const Capture& capture, const AnalysisConfig& cfg) {
    AnalysisResult r;
    AnalysisReport& rep = r.report;
    rep.parameters = parameters_json(cfg);
    rep.undecodable_frames = capture.stats.undecodable;
    rep.skipped_other_frames = capture.stats.skipped_other;
    rep.truncated_ie_frames = capture.stats.truncated_ies;

    std::vector<CaptureRecord> records = capture.records;
    if (cfg.anonymize_key) records = anonymize_capture(std::move(records), *cfg.anonymize_key);

    r.instances = instances_from_capture(records, cfg.instance, &rep.group_probes_excluded);
    rep.probe_count = records.size() - rep.group_probes_excluded;
    rep.instance_count = r.instances.size();
    for (const ScanInstance& inst : r.instances)
        if (inst.probe_indices.size() == 1) ++rep.single_probe_instances;

    r.devices_pre = cluster_devices(r.instances, cfg.similarity);
    r.devices_post = temporal_merge(r.devices_pre, r.instances, cfg.temporal);

    rep.device_count_pre_merge = r.devices_pre.size();
    rep.device_count_post_merge = r.devices_post.size();
    for (const DeviceCluster& d : r.devices_pre) {
        if (d.randomized)
            ++rep.randomized_devices_pre;
        else
            ++rep.global_mac_devices;
        if (d.single_instance) ++rep.single_instance_devices_pre;
    }
    for (const DeviceCluster& d : r.devices_post) {
        if (d.randomized) ++rep.randomized_devices_post;
        if (d.single_instance) ++rep.single_instance_devices_post;
    }

    rep.timelines_pre = detail::build_timelines(r.devices_pre, r.instances, cfg.temporal);
    rep.timelines_post = detail::build_timelines(r.devices_post, r.instances, cfg.temporal);
    return r;
}

inline Json timeline_to_json(const std::vector<TimelineEntry>& entries) {
    Json arr = Json::array();
    for (const TimelineEntry& e : entries) {
        Json j;
        j["device"] = e.device_id;
        j["randomized"] = e.randomized;
        j["instances"] = e.instance_count;
        Json cl = Json::array();
        for (const auto& [s, t] : e.clusters) {
            Json c;
            c["start_s"] = s;
            c["end_s"] = t;
            cl.push_back(std::move(c));
        }
        j["clusters"] = cl;
        arr.push_back(std::move(j));
    }
    return arr;
}

inline Json report_to_json(const AnalysisReport& rep) {
    Json j;
    j["probe_count"] = rep.probe_count;
    j["group_probes_excluded"] = rep.group_probes_excluded;
    j["undecodable_frames"] = rep.undecodable_frames;
    j["skipped_other_frames"] = rep.skipped_other_frames;
    j["truncated_ie_frames"] = rep.truncated_ie_frames;
    j["instance_count"] = rep.instance_count;
    j["single_probe_instances"] = rep.single_probe_instances;
    j["device_count_pre_merge"] = rep.device_count_pre_merge;
    j["device_count_post_merge"] = rep.device_count_post_merge;
    j["global_mac_devices"] = rep.global_mac_devices;
    j["randomized_devices_pre"] = rep.randomized_devices_pre;
    j["randomized_devices_post"] = rep.randomized_devices_post;
    j["single_instance_devices_pre"] = rep.single_instance_devices_pre;
    j["single_instance_devices_post"] = rep.single_instance_devices_post;
    j["parameters"] = rep.parameters;
    j["timelines_pre"] = timeline_to_json(rep.timelines_pre);
    j["timelines_post"] = timeline_to_json(rep.timelines_post);
    return j;
}

// --- timeline rendering -----------------------------------------------------

namespace detail {
inline std::vector<std::size_t> select_timeline_ids(const std::vector<TimelineEntry>& entries,
                                                    const std::vector<std::size_t>& requested) {
    if (requested.empty()) {
        std::vector<std::size_t> all(entries.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        return all;
    }
    for (std::size_t id : requested) {
        if (id < entries.size()) continue;
        std::string valid = entries.empty() ? "none" : "0.." + std::to_string(entries.size() - 1);
        throw ConfigError("unknown device id " + std::to_string(id) + " (valid ids: " + valid + ")");
    }
    return requested;
}

inline std::string format_seconds(double s) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", s);
    return buf;
}
}  // namespace detail

inline std::string render_timeline_csv(const std::vector<TimelineEntry>& entries,
                                       const std::vector<std::size_t>& device_ids = {}) {
    std::string out = "device,randomized,start_s,end_s\n";
    for (std::size_t id : detail::select_timeline_ids(entries, device_ids)) {
        const TimelineEntry& e = entries[id];
        for (const auto& [s, t] : e.clusters)
            out += std::to_string(e.device_id) + "," + (e.randomized ? "true" : "false") + "," +
                   detail::format_seconds(s) + "," + detail::format_seconds(t) + "\n";
    }
    return out;
}

// Static SVG: one lane per device, one bar per appearance cluster, bottom
// time axis in seconds. Randomized-MAC devices render orange, global blue.
inline std::string render_timeline_svg(const std::vector<TimelineEntry>& entries,
                                       const std::vector<std::size_t>& device_ids = {}) {
    const std::vector<std::size_t> ids = detail::select_timeline_ids(entries, device_ids);

    double t0 = 0.0, t1 = 1.0;
    bool any = false;
    for (std::size_t id : ids) {
        for (const auto& [s, t] : entries[id].clusters) {
            if (!any) {
                t0 = s;
                t1 = t;
                any = true;
            } else {
                t0 = std::min(t0, s);
                t1 = std::max(t1, t);
            }
        }
    }
    if (!any || t1 <= t0) t1 = t0 + 1.0;

    constexpr int kLeft = 180, kRight = 24, kTop = 16, kBottom = 42;
    constexpr int kLaneH = 26, kBarH = 14, kPlotW = 820;
    const int height = kTop + static_cast<int>(ids.size()) * kLaneH + kBottom;
    const int width = kLeft + kPlotW + kRight;
    const auto x_of = [&](double t) {
        return kLeft + (t - t0) / (t1 - t0) * static_cast<double>(kPlotW);
    };

    char buf[512];
    std::string svg;
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                  "font-family=\"monospace\" font-size=\"12\">\n",
                  width, height);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"0\" y=\"0\" width=\"%d\" height=\"%d\" fill=\"white\"/>\n", width,
                  height);
    svg += buf;

    for (std::size_t row = 0; row < ids.size(); ++row) {
        const TimelineEntry& e = entries[ids[row]];
        const int y = kTop + static_cast<int>(row) * kLaneH;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"8\" y=\"%d\" fill=\"#333\">device %zu (%s)</text>\n",
                      y + kLaneH / 2 + 4, e.device_id, e.randomized ? "randomized" : "global");
        svg += buf;
        const char* color = e.randomized ? "#d9822b" : "#2b6cb0";
        for (const auto& [s, t] : e.clusters) {
            const double x = x_of(s);
            const double w = std::max(x_of(t) - x, 1.0);
            std::snprintf(buf, sizeof(buf),
                          "<rect x=\"%.2f\" y=\"%d\" width=\"%.2f\" height=\"%d\" fill=\"%s\"/>\n",
                          x, y + (kLaneH - kBarH) / 2, w, kBarH, color);
            svg += buf;
        }
    }

    const int axis_y = kTop + static_cast<int>(ids.size()) * kLaneH + 8;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"#333\"/>\n", kLeft,
                  axis_y, kLeft + kPlotW, axis_y);
    svg += buf;
    for (int tick = 0; tick <= 4; ++tick) {
        const double t = t0 + (t1 - t0) * tick / 4.0;
        const double x = x_of(t);
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.2f\" y1=\"%d\" x2=\"%.2f\" y2=\"%d\" stroke=\"#333\"/>\n", x,
                      axis_y, x, axis_y + 5);
        svg += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.2f\" y=\"%d\" fill=\"#333\" text-anchor=\"middle\">%.1f s</text>\n",
                      x, axis_y + 20, t);
        svg += buf;
    }
    svg += "</svg>\n";
    return svg;
}

// --- artifact verification ---------------------------------------------------

struct ArtifactSet {
    Json report;
    std::vector<ScanInstance> instances;
    DeviceArtifacts devices_pre;
    DeviceArtifacts devices_post;
};

namespace detail {

inline std::size_t report_count(const Json& rep, const char* key) {
    if (!rep.contains(key) || !rep.at(key).is_number_unsigned())
        throw ConsistencyError(std::string("report is missing count '") + key + "'");
    return rep.at(key).get<std::size_t>();
}

[[noreturn]] inline void inconsistent(const std::string& what) {
    throw ConsistencyError("artifact inconsistency: " + what);
}

// Returns instance id -> device position, checking the devices partition
// exactly the instance id set {0..instance_count-1}.
inline std::vector<std::size_t> partition_of(const std::vector<DeviceCluster>& devices,
                                             std::size_t instance_count, const char* stage) {
    std::vector<std::size_t> owner(instance_count, static_cast<std::size_t>(-1));
    std::size_t assigned = 0;
    for (std::size_t d = 0; d < devices.size(); ++d) {
        for (std::size_t iid : devices[d].instance_ids) {
            if (iid >= instance_count)
                inconsistent(std::string(stage) + " references instance id out of range");
            if (owner[iid] != static_cast<std::size_t>(-1))
                inconsistent(std::string(stage) + " assigns instance " + std::to_string(iid) +
                             " to two devices");
            owner[iid] = d;
            ++assigned;
        }
    }
    if (assigned != instance_count)
        inconsistent(std::string(stage) + " covers " + std::to_string(assigned) + " of " +
                     std::to_string(instance_count) + " instances");
    return owner;
}

}  // namespace detail

// Cross-checks every count in the report against the emitted artifacts.
// Throws ConsistencyError on the first mismatch.
inline void verify_artifacts(const ArtifactSet& a) {
    const std::size_t probe_count = detail::report_count(a.report, "probe_count");
    const std::size_t instance_count = detail::report_count(a.report, "instance_count");
    const std::size_t pre_count = detail::report_count(a.report, "device_count_pre_merge");
    const std::size_t post_count = detail::report_count(a.report, "device_count_post_merge");
    const std::size_t global_devs = detail::report_count(a.report, "global_mac_devices");
    const std::size_t rand_pre = detail::report_count(a.report, "randomized_devices_pre");
    const std::size_t rand_post = detail::report_count(a.report, "randomized_devices_post");

    if (instance_count > probe_count) detail::inconsistent("more instances than probes");
    if (pre_count > instance_count) detail::inconsistent("more devices than instances");
    if (post_count > pre_count) detail::inconsistent("merge increased the device count");
    if (global_devs + rand_pre != pre_count)
        detail::inconsistent("global + randomized devices do not sum to the pre-merge count");

    if (a.instances.size() != instance_count)
        detail::inconsistent("instance file holds " + std::to_string(a.instances.size()) +
                             " records, report says " + std::to_string(instance_count));

    std::set<std::size_t> probe_ids;
    std::size_t probe_total = 0;
    for (const ScanInstance& inst : a.instances) {
        if (inst.probe_indices.empty()) detail::inconsistent("instance without probes");
        for (std::size_t pi : inst.probe_indices) {
            if (!probe_ids.insert(pi).second)
                detail::inconsistent("probe " + std::to_string(pi) + " in two instances");
            ++probe_total;
        }
    }
    if (probe_total != probe_count)
        detail::inconsistent("instances cover " + std::to_string(probe_total) +
                             " probes, report says " + std::to_string(probe_count));

    if (a.devices_pre.devices.size() != pre_count)
        detail::inconsistent("pre-merge device file disagrees with the report count");
    if (a.devices_post.devices.size() != post_count)
        detail::inconsistent("post-merge device file disagrees with the report count");

    const auto pre_owner = detail::partition_of(a.devices_pre.devices, instance_count, "pre-merge");
    const auto post_owner =
        detail::partition_of(a.devices_post.devices, instance_count, "post-merge");

    // The merge only ever coarsens: one pre device never lands in two post devices.
    for (const DeviceCluster& d : a.devices_pre.devices) {
        const std::size_t target = post_owner[d.instance_ids.front()];
        for (std::size_t iid : d.instance_ids)
            if (post_owner[iid] != target)
                detail::inconsistent("merge split a pre-merge device across post-merge devices");
    }

    std::size_t rand_pre_actual = 0, global_actual = 0, rand_post_actual = 0;
    for (const DeviceCluster& d : a.devices_pre.devices)
        (d.randomized ? rand_pre_actual : global_actual) += 1;
    for (const DeviceCluster& d : a.devices_post.devices)
        if (d.randomized) ++rand_post_actual;
    if (rand_pre_actual != rand_pre || global_actual != global_devs)
        detail::inconsistent("device MAC classes disagree with the report counts");
    if (rand_post_actual != rand_post)
        detail::inconsistent("post-merge randomized count disagrees with the report");

    // Identity fields embedded in device members must match the instance file.
    for (const DeviceCluster& d : a.devices_pre.devices) {
        for (std::size_t iid : d.instance_ids) {
            const ScanInstance& mine = a.devices_pre.instances[iid];
            const ScanInstance& canonical = a.instances[iid];
            if (mine.mac != canonical.mac || mine.fingerprint.digest != canonical.fingerprint.digest ||
                mine.first_ts != canonical.first_ts || mine.last_ts != canonical.last_ts ||
                mine.ssids != canonical.ssids)
                detail::inconsistent("device member " + std::to_string(iid) +
                                     " disagrees with the instance file");
        }
    }

    if (a.report.contains("timelines_pre") &&
        a.report.at("timelines_pre").size() != pre_count)
        detail::inconsistent("pre-merge timeline lane count disagrees with the device count");
    if (a.report.contains("timelines_post") &&
        a.report.at("timelines_post").size() != post_count)
        detail::inconsistent("post-merge timeline lane count disagrees with the device count");
}

}  // namespace probekit
