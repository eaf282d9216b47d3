#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "probekit/frame.hpp"
#include "probekit/pcap.hpp"
#include "probekit/records.hpp"

namespace probekit {

struct CaptureRecord {
    ProbeRequest probe;
    // On-air 802.11 frame bytes (radiotap and FCS stripped); re-decoding
    // them reproduces `probe`. Absent for records-format input.
    std::optional<Bytes> raw_frame;
};

enum class CaptureFormat { Pcap, Records };

struct ReadStats {
    std::uint64_t probes = 0;
    std::uint64_t skipped_other = 0;  // well-formed frames of other types
    std::uint64_t undecodable = 0;    // counted, skipped, with a warning
    std::uint64_t truncated_ies = 0;  // decoded, but IE list was cut short
};

struct Capture {
    std::vector<CaptureRecord> records;
    ReadStats stats;
    std::vector<std::string> warnings;
};

inline Capture read_pcap(std::istream& in) {
    Capture cap;
    PcapReader reader(in);
    std::uint32_t linktype = reader.linktype();
    if (linktype != kLinktypeIeee80211 && linktype != kLinktypeRadiotap)
        throw FormatError("pcap: unsupported linktype " + std::to_string(linktype) +
                          " (need 105 raw 802.11 or 127 radiotap)");
    std::uint64_t index = 0;
    while (auto pkt = reader.next()) {
        std::size_t frame_off = 0;
        bool strip_fcs = false;
        if (linktype == kLinktypeRadiotap) {
            auto rt = parse_radiotap(pkt->data);
            if (!rt) {
                ++cap.stats.undecodable;
                cap.warnings.push_back("packet " + std::to_string(index) + ": malformed radiotap header");
                ++index;
                continue;
            }
            frame_off = rt->header_len;
            strip_fcs = rt->fcs_present;
        }
        std::span<const std::uint8_t> frame(pkt->data.data() + frame_off, pkt->data.size() - frame_off);
        if (strip_fcs) {
            if (frame.size() < 4) {
                ++cap.stats.undecodable;
                cap.warnings.push_back("packet " + std::to_string(index) + ": shorter than its FCS");
                ++index;
                continue;
            }
            frame = frame.first(frame.size() - 4);
        }
        if (!is_probe_request_frame(frame)) {
            ++cap.stats.skipped_other;
            ++index;
            continue;
        }
        auto decoded = decode_frame(frame, pkt->ts);
        if (!decoded) {
            ++cap.stats.undecodable;
            cap.warnings.push_back("packet " + std::to_string(index) + ": probe request shorter than the MAC header");
            ++index;
            continue;
        }
        if (decoded->truncated) ++cap.stats.truncated_ies;
        CaptureRecord rec;
        rec.probe = std::move(decoded->probe);
        rec.raw_frame = Bytes(frame.begin(), frame.end());
        cap.records.push_back(std::move(rec));
        ++cap.stats.probes;
        ++index;
    }
    if (reader.truncated_tail()) {
        ++cap.stats.undecodable;
        cap.warnings.push_back("file ends mid-record; trailing packet dropped");
    }
    return cap;
}

inline Capture read_records(std::istream& in) {
    Capture cap;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            CaptureRecord rec;
            rec.probe = probe_from_json(parse_json_line(line, line_no));
            cap.records.push_back(std::move(rec));
            ++cap.stats.probes;
        } catch (const FormatError& e) {
            ++cap.stats.undecodable;
            cap.warnings.push_back("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cap;
}

inline Capture read_capture(std::istream& in, CaptureFormat format) {
    return format == CaptureFormat::Pcap ? read_pcap(in) : read_records(in);
}

// Sniffs the pcap magic; anything else is treated as records.
inline CaptureFormat detect_format(std::istream& in) {
    char head[4] = {};
    in.read(head, 4);
    in.clear();
    in.seekg(0);
    std::uint32_t magic = detail::load_u32(reinterpret_cast<const std::uint8_t*>(head), false);
    return (magic == kPcapMagic || magic == kPcapMagicSwapped) ? CaptureFormat::Pcap
                                                               : CaptureFormat::Records;
}

inline std::uint64_t write_capture(const std::vector<CaptureRecord>& records, std::ostream& out,
                                   CaptureFormat format) {
    if (format == CaptureFormat::Pcap) {
        PcapWriter writer(out, kLinktypeIeee80211);
        for (const auto& rec : records) {
            if (rec.raw_frame)
                writer.write(rec.probe.timestamp, *rec.raw_frame);
            else
                writer.write(rec.probe.timestamp, encode_frame(rec.probe));
        }
        return writer.bytes_written();
    }
    std::uint64_t bytes = 0;
    for (const auto& rec : records) {
        std::string line = probe_to_json(rec.probe).dump();
        line.push_back('\n');
        out.write(line.data(), static_cast<std::streamsize>(line.size()));
        if (!out) throw IoError("records: write failed after " + std::to_string(bytes) + " bytes");
        bytes += line.size();
    }
    return bytes;
}

inline Capture read_capture_file(const std::string& path, std::optional<CaptureFormat> format = std::nullopt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    CaptureFormat fmt = format ? *format : detect_format(in);
    return read_capture(in, fmt);
}

inline std::uint64_t write_capture_file(const std::vector<CaptureRecord>& records, const std::string& path,
                                        CaptureFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    return write_capture(records, out, format);
}

}  // namespace probekit
