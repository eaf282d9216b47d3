#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "probekit/bytes.hpp"
#include "probekit/device_id.hpp"
#include "probekit/errors.hpp"
#include "probekit/fingerprint.hpp"
#include "probekit/records.hpp"
#include "probekit/scan_instance.hpp"

// JSON-lines artifacts connecting the pipeline stages. Instance ids are the
// line positions the instances were emitted at; device lines embed enough of
// each member instance (identity fields, not probes) that the merge stage can
// run from a device file alone.

namespace probekit {

namespace detail {

inline Json ssid_set_to_json(const std::set<Bytes>& ssids) {
    Json arr = Json::array();
    for (const Bytes& s : ssids) arr.push_back(hex_encode(s));
    return arr;
}

inline Json instance_summary_json(std::size_t id, const ScanInstance& inst) {
    Json j;
    j["id"] = id;
    j["mac"] = format_mac(inst.mac);
    j["first_ts"] = ts_to_seconds(inst.first_ts);
    j["last_ts"] = ts_to_seconds(inst.last_ts);
    j["probe_count"] = inst.probe_indices.size();
    j["probe_indices"] = inst.probe_indices;
    j["ssids"] = ssid_set_to_json(inst.ssids);
    j["fingerprint"] = fingerprint_hex(inst.fingerprint);
    j["has_wps"] = inst.has_wps;
    if (inst.uuid_e)
        j["uuid_e"] = hex_encode(Bytes(inst.uuid_e->begin(), inst.uuid_e->end()));
    else
        j["uuid_e"] = nullptr;
    return j;
}

inline const Json& require_key(const Json& j, const char* key, const char* what) {
    if (!j.contains(key))
        throw FormatError(std::string(what) + " record missing key '" + key + "'");
    return j.at(key);
}

// Rebuilds the identity fields of an instance from a summary object.
// `probes` stays empty: downstream clustering only reads the fields.
inline ScanInstance instance_from_summary(const Json& j, const char* what) {
    ScanInstance inst;
    try {
        const auto mac = parse_mac(require_key(j, "mac", what).get<std::string>());
        if (!mac) throw FormatError(std::string(what) + " record has a malformed mac");
        inst.mac = *mac;
        inst.first_ts = ts_from_seconds(require_key(j, "first_ts", what).get<double>());
        inst.last_ts = ts_from_seconds(require_key(j, "last_ts", what).get<double>());
        for (const Json& s : require_key(j, "ssids", what))
            inst.ssids.insert(hex_decode(s.get<std::string>()));
        const Bytes digest = hex_decode(require_key(j, "fingerprint", what).get<std::string>());
        if (digest.size() != inst.fingerprint.digest.size())
            throw FormatError(std::string(what) + " record fingerprint is not 128 hex digits");
        std::copy(digest.begin(), digest.end(), inst.fingerprint.digest.begin());
        inst.has_wps = require_key(j, "has_wps", what).get<bool>();
        const Json& uuid = require_key(j, "uuid_e", what);
        if (!uuid.is_null()) {
            const Bytes raw = hex_decode(uuid.get<std::string>());
            if (raw.size() != 16)
                throw FormatError(std::string(what) + " record uuid_e is not 32 hex digits");
            std::array<std::uint8_t, 16> u{};
            std::copy(raw.begin(), raw.end(), u.begin());
            inst.uuid_e = u;
        }
        if (j.contains("probe_indices"))
            inst.probe_indices = j.at("probe_indices").get<std::vector<std::size_t>>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string(what) + " record malformed: " + e.what());
    }
    return inst;
}

}  // namespace detail

inline Json instance_to_json(std::size_t id, const ScanInstance& inst) {
    return detail::instance_summary_json(id, inst);
}

inline Json device_to_json(std::size_t id, const DeviceCluster& dev,
                           std::span<const ScanInstance> instances) {
    Json j;
    j["id"] = id;
    j["first_ts"] = ts_to_seconds(dev.first_ts);
    j["last_ts"] = ts_to_seconds(dev.last_ts);
    j["randomized"] = dev.randomized;
    j["single_instance"] = dev.single_instance;
    Json macs = Json::array();
    for (const MacAddress& m : dev.macs) macs.push_back(format_mac(m));
    j["macs"] = macs;
    j["ssids"] = detail::ssid_set_to_json(dev.ssid_union);
    Json uuids = Json::array();
    for (const auto& u : dev.uuid_es) uuids.push_back(hex_encode(Bytes(u.begin(), u.end())));
    j["uuid_es"] = uuids;
    Json fps = Json::array();
    for (const Fingerprint& f : dev.fingerprints) fps.push_back(fingerprint_hex(f));
    j["fingerprints"] = fps;
    Json members = Json::array();
    for (std::size_t iid : dev.instance_ids)
        members.push_back(detail::instance_summary_json(iid, instances[iid]));
    j["instances"] = members;
    return j;
}

inline void write_instances_jsonl(std::ostream& os, std::span<const ScanInstance> instances) {
    for (std::size_t i = 0; i < instances.size(); ++i)
        os << instance_to_json(i, instances[i]).dump() << '\n';
    if (!os) throw IoError("short write on instance output");
}

inline void write_devices_jsonl(std::ostream& os, std::span<const DeviceCluster> devices,
                                std::span<const ScanInstance> instances) {
    for (std::size_t i = 0; i < devices.size(); ++i)
        os << device_to_json(i, devices[i], instances).dump() << '\n';
    if (!os) throw IoError("short write on device output");
}

// Instance ids are positional: whatever ids the lines carry, the vector index
// a line lands at is the id downstream stages use.
inline std::vector<ScanInstance> read_instances_jsonl(std::istream& is) {
    std::vector<ScanInstance> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw FormatError("instance line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!j.contains("fingerprint") || !j.contains("mac"))
            throw FormatError("instance line " + std::to_string(lineno) +
                              ": not an instance record (run `instances` on a capture first)");
        out.push_back(detail::instance_from_summary(j, "instance"));
    }
    return out;
}

struct DeviceArtifacts {
    std::vector<DeviceCluster> devices;
    // Indexed by the original instance ids devices refer to; slots never
    // referenced stay default-constructed.
    std::vector<ScanInstance> instances;
};

inline DeviceArtifacts read_devices_jsonl(std::istream& is) {
    DeviceArtifacts out;
    std::vector<std::pair<std::size_t, ScanInstance>> members_by_id;
    std::vector<std::vector<std::size_t>> memberships;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw FormatError("device line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!j.contains("instances"))
            throw FormatError("device line " + std::to_string(lineno) +
                              ": not a device record (run `devices` first)");
        std::vector<std::size_t> ids;
        try {
            for (const Json& m : j.at("instances")) {
                const std::size_t iid =
                    detail::require_key(m, "id", "device member").get<std::size_t>();
                ids.push_back(iid);
                members_by_id.emplace_back(iid, detail::instance_from_summary(m, "device member"));
            }
        } catch (const Json::exception& e) {
            throw FormatError("device line " + std::to_string(lineno) + ": " + e.what());
        }
        if (ids.empty())
            throw FormatError("device line " + std::to_string(lineno) + ": no member instances");
        memberships.push_back(std::move(ids));
    }

    std::size_t max_id = 0;
    for (const auto& [iid, inst] : members_by_id) max_id = std::max(max_id, iid);
    out.instances.resize(members_by_id.empty() ? 0 : max_id + 1);
    std::vector<bool> seen(out.instances.size(), false);
    for (auto& [iid, inst] : members_by_id) {
        if (seen[iid]) throw FormatError("instance id " + std::to_string(iid) +
                                         " appears in more than one device");
        seen[iid] = true;
        out.instances[iid] = std::move(inst);
    }
    for (auto& ids : memberships)
        out.devices.push_back(detail::make_cluster(out.instances, std::move(ids)));
    return out;
}

}  // namespace probekit
