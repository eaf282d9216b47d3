#pragma once

#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "probekit/errors.hpp"
#include "probekit/probe.hpp"

namespace probekit {

using Json = nlohmann::ordered_json;

// One probe per line:
//   {"ts":…, "mac":"aa:bb:cc:dd:ee:ff", "sn":…, "ssid":hex|null,
//    "ies":[{"tag":…, "payload":hex}…], "wps":{…}|null}
inline Json probe_to_json(const ProbeRequest& p) {
    Json j;
    j["ts"] = ts_to_seconds(p.timestamp);
    j["mac"] = format_mac(p.mac);
    j["sn"] = p.sequence_number;
    j["ssid"] = p.ssid ? Json(hex_encode(*p.ssid)) : Json(nullptr);
    Json ies = Json::array();
    for (const auto& el : p.elements)
        ies.push_back(Json{{"tag", el.tag}, {"payload", hex_encode(el.payload)}});
    j["ies"] = std::move(ies);
    if (p.wps) {
        Json w;
        w["uuid_e"] = p.wps->uuid_e ? Json(hex_encode(p.wps->uuid_e->data(), 16)) : Json(nullptr);
        auto opt_hex = [](const std::optional<Bytes>& b) {
            return b ? Json(hex_encode(*b)) : Json(nullptr);
        };
        w["name"] = opt_hex(p.wps->device_name);
        w["manufacturer"] = opt_hex(p.wps->manufacturer);
        w["model"] = opt_hex(p.wps->model);
        j["wps"] = std::move(w);
    } else {
        j["wps"] = nullptr;
    }
    return j;
}

inline ProbeRequest probe_from_json(const Json& j) {
    try {
        ProbeRequest p;
        p.timestamp = ts_from_seconds(j.at("ts").get<double>());
        auto mac = parse_mac(j.at("mac").get<std::string>());
        if (!mac) throw FormatError("records: malformed mac field");
        p.mac = *mac;
        auto sn = j.at("sn").get<int>();
        if (sn < 0 || sn >= 4096) throw FormatError("records: sn out of 12-bit range");
        p.sequence_number = static_cast<std::uint16_t>(sn);
        if (!j.at("ssid").is_null())
            p.ssid = hex_decode(j.at("ssid").get<std::string>());
        for (const auto& e : j.at("ies")) {
            InformationElement el;
            int tag = e.at("tag").get<int>();
            if (tag < 0 || tag > 255) throw FormatError("records: ie tag out of range");
            el.tag = static_cast<std::uint8_t>(tag);
            el.payload = hex_decode(e.at("payload").get<std::string>());
            if (el.payload.size() > 255) throw FormatError("records: ie payload exceeds 255 bytes");
            p.elements.push_back(std::move(el));
        }
        if (!j.at("wps").is_null()) {
            const auto& w = j.at("wps");
            WpsInfo info;
            if (!w.at("uuid_e").is_null()) {
                Bytes u = hex_decode(w.at("uuid_e").get<std::string>());
                if (u.size() != 16) throw FormatError("records: uuid_e must be 16 bytes");
                std::array<std::uint8_t, 16> arr;
                std::copy(u.begin(), u.end(), arr.begin());
                info.uuid_e = arr;
            }
            auto opt_bytes = [](const Json& v) -> std::optional<Bytes> {
                if (v.is_null()) return std::nullopt;
                return hex_decode(v.get<std::string>());
            };
            info.device_name = opt_bytes(w.at("name"));
            info.manufacturer = opt_bytes(w.at("manufacturer"));
            info.model = opt_bytes(w.at("model"));
            p.wps = std::move(info);
        }
        return p;
    } catch (const FormatError&) {
        throw;
    } catch (const std::exception& e) {
        throw FormatError(std::string("records: ") + e.what());
    }
}

inline Json parse_json_line(const std::string& line, std::size_t line_no) {
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded())
        throw FormatError("records: line " + std::to_string(line_no) + " is not valid JSON");
    return j;
}

}  // namespace probekit
