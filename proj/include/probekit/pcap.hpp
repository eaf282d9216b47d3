#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>

#include "probekit/bytes.hpp"
#include "probekit/errors.hpp"
#include "probekit/probe.hpp"

namespace probekit {

constexpr std::uint32_t kPcapMagic = 0xa1b2c3d4;  // classic, microsecond timestamps
constexpr std::uint32_t kPcapMagicSwapped = 0xd4c3b2a1;
constexpr std::uint32_t kLinktypeIeee80211 = 105;
constexpr std::uint32_t kLinktypeRadiotap = 127;

// Guard against desynchronized packet lengths; real snaplens stay far below.
constexpr std::uint32_t kMaxPacketLen = 1u << 20;

struct PcapPacket {
    Timestamp ts = 0;
    Bytes data;
};

namespace detail {
inline std::uint32_t load_u32(const std::uint8_t* p, bool swapped) {
    std::uint32_t v = static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
                      static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
    if (swapped) v = __builtin_bswap32(v);
    return v;
}
inline void store_u32(std::ostream& os, std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8 & 0xff),
                 static_cast<char>(v >> 16 & 0xff), static_cast<char>(v >> 24 & 0xff)};
    os.write(b, 4);
}
inline void store_u16(std::ostream& os, std::uint16_t v) {
    char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8 & 0xff)};
    os.write(b, 2);
}
}  // namespace detail

class PcapReader {
public:
    explicit PcapReader(std::istream& in) : in_(in) {
        std::uint8_t hdr[24];
        in_.read(reinterpret_cast<char*>(hdr), sizeof(hdr));
        if (in_.gcount() != sizeof(hdr))
            throw FormatError("pcap: file shorter than the global header");
        std::uint32_t magic = detail::load_u32(hdr, false);
        if (magic == kPcapMagic)
            swapped_ = false;
        else if (magic == kPcapMagicSwapped)
            swapped_ = true;
        else
            throw FormatError("pcap: unrecognized magic number");
        linktype_ = detail::load_u32(hdr + 20, swapped_);
    }

    std::uint32_t linktype() const { return linktype_; }

    // nullopt at end of stream. A record header or body cut short counts
    // as one truncated packet and ends the stream.
    std::optional<PcapPacket> next() {
        std::uint8_t rec[16];
        in_.read(reinterpret_cast<char*>(rec), sizeof(rec));
        if (in_.gcount() == 0) return std::nullopt;
        if (in_.gcount() != sizeof(rec)) {
            truncated_tail_ = true;
            return std::nullopt;
        }
        std::uint32_t ts_sec = detail::load_u32(rec, swapped_);
        std::uint32_t ts_usec = detail::load_u32(rec + 4, swapped_);
        std::uint32_t incl_len = detail::load_u32(rec + 8, swapped_);
        if (incl_len > kMaxPacketLen)
            throw FormatError("pcap: packet record length is implausible; file is corrupt");
        PcapPacket pkt;
        pkt.ts = static_cast<Timestamp>(ts_sec) * 1000000 + ts_usec;
        pkt.data.resize(incl_len);
        in_.read(reinterpret_cast<char*>(pkt.data.data()), incl_len);
        if (in_.gcount() != static_cast<std::streamsize>(incl_len)) {
            truncated_tail_ = true;
            return std::nullopt;
        }
        return pkt;
    }

    bool truncated_tail() const { return truncated_tail_; }

private:
    std::istream& in_;
    bool swapped_ = false;
    bool truncated_tail_ = false;
    std::uint32_t linktype_ = 0;
};

class PcapWriter {
public:
    PcapWriter(std::ostream& out, std::uint32_t linktype) : out_(out) {
        detail::store_u32(out_, kPcapMagic);
        detail::store_u16(out_, 2);
        detail::store_u16(out_, 4);
        detail::store_u32(out_, 0);      // thiszone
        detail::store_u32(out_, 0);      // sigfigs
        detail::store_u32(out_, 65535);  // snaplen
        detail::store_u32(out_, linktype);
        bytes_written_ = 24;
    }

    void write(Timestamp ts, std::span<const std::uint8_t> data) {
        detail::store_u32(out_, static_cast<std::uint32_t>(ts / 1000000));
        detail::store_u32(out_, static_cast<std::uint32_t>(ts % 1000000));
        detail::store_u32(out_, static_cast<std::uint32_t>(data.size()));
        detail::store_u32(out_, static_cast<std::uint32_t>(data.size()));
        out_.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
        if (!out_)
            throw IoError("pcap: write failed after " + std::to_string(bytes_written_) + " bytes");
        bytes_written_ += 16 + data.size();
    }

    std::uint64_t bytes_written() const { return bytes_written_; }

private:
    std::ostream& out_;
    std::uint64_t bytes_written_ = 0;
};

}  // namespace probekit
