#include <sstream>

#include "test_util.hpp"

using namespace pktest;

namespace {

std::vector<CaptureRecord> sample_records() {
    std::vector<CaptureRecord> recs;
    recs.push_back({make_probe(1.0, "f8:e4:3b:aa:bb:cc", 10, "HomeNet"), std::nullopt});
    recs.push_back({make_probe(1.5, "da:a1:19:01:02:03", 11), std::nullopt});
    recs.push_back({with_wps(make_probe(2.25, "02:11:22:33:44:55", 4095, "Cafe"),
                             "00112233445566778899aabbccddeeff", "Phone"),
                    std::nullopt});
    return recs;
}

}  // anonymous namespace

TEST_CASE("pcap round trip preserves probes and timestamps", "[capture]") {
    const auto recs = sample_records();
    std::stringstream buf;
    write_capture(recs, buf, CaptureFormat::Pcap);

    buf.seekg(0);
    const Capture cap = read_pcap(buf);
    REQUIRE(cap.records.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(cap.records[i].probe == recs[i].probe);
        REQUIRE(cap.records[i].raw_frame.has_value());
        CHECK(*cap.records[i].raw_frame == encode_frame(recs[i].probe));
    }
    CHECK(cap.stats.probes == recs.size());
    CHECK(cap.stats.undecodable == 0);
}

TEST_CASE("records round trip preserves every field", "[capture]") {
    const auto recs = sample_records();
    std::stringstream buf;
    write_capture(recs, buf, CaptureFormat::Records);

    buf.seekg(0);
    const Capture cap = read_records(buf);
    REQUIRE(cap.records.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) CHECK(cap.records[i].probe == recs[i].probe);
}

TEST_CASE("probe json round trip covers optionals", "[capture]") {
    for (const auto& rec : sample_records()) {
        const Json j = probe_to_json(rec.probe);
        CHECK(probe_from_json(j) == rec.probe);
    }
}

TEST_CASE("format detection sniffs the magic number", "[capture]") {
    const auto recs = sample_records();
    std::stringstream pcap_buf, rec_buf;
    write_capture(recs, pcap_buf, CaptureFormat::Pcap);
    write_capture(recs, rec_buf, CaptureFormat::Records);

    pcap_buf.seekg(0);
    CHECK(detect_format(pcap_buf) == CaptureFormat::Pcap);
    CHECK(read_capture(pcap_buf, CaptureFormat::Pcap).records.size() == recs.size());

    rec_buf.seekg(0);
    CHECK(detect_format(rec_buf) == CaptureFormat::Records);
    CHECK(read_capture(rec_buf, CaptureFormat::Records).records.size() == recs.size());
}

TEST_CASE("byte-swapped pcap headers read correctly", "[capture]") {
    const ProbeRequest p = make_probe(3.000001, "f8:e4:3b:aa:bb:cc", 9, "X");
    const Bytes frame = encode_frame(p);

    std::string data;
    auto be32 = [&](std::uint32_t v) {
        data.push_back(static_cast<char>(v >> 24));
        data.push_back(static_cast<char>(v >> 16));
        data.push_back(static_cast<char>(v >> 8));
        data.push_back(static_cast<char>(v));
    };
    auto be16 = [&](std::uint16_t v) {
        data.push_back(static_cast<char>(v >> 8));
        data.push_back(static_cast<char>(v));
    };
    be32(0xa1b2c3d4);  // written big-endian = swapped for a little-endian reader
    be16(2);
    be16(4);
    be32(0);
    be32(0);
    be32(65535);
    be32(kLinktypeIeee80211);
    be32(3);  // ts sec
    be32(1);  // ts usec
    be32(static_cast<std::uint32_t>(frame.size()));
    be32(static_cast<std::uint32_t>(frame.size()));
    data.append(frame.begin(), frame.end());

    std::stringstream buf(data);
    const Capture cap = read_pcap(buf);
    REQUIRE(cap.records.size() == 1);
    CHECK(cap.records[0].probe == p);
}

TEST_CASE("radiotap link type strips the header and fcs", "[capture]") {
    const ProbeRequest p = make_probe(1.0, "02:00:00:00:00:07", 5, "Y");
    Bytes frame = encode_frame(p);

    // radiotap with FLAGS present and FCS bit set, then frame, then 4 FCS bytes.
    Bytes pkt = {0x00, 0x00, 0x09, 0x00, 0x02, 0x00, 0x00, 0x00, 0x10};
    pkt.insert(pkt.end(), frame.begin(), frame.end());
    pkt.insert(pkt.end(), {0xde, 0xad, 0xbe, 0xef});

    std::stringstream buf;
    {
        PcapWriter w(buf, kLinktypeRadiotap);
        w.write(p.timestamp, pkt);
    }
    buf.seekg(0);
    const Capture cap = read_pcap(buf);
    REQUIRE(cap.records.size() == 1);
    CHECK(cap.records[0].probe == p);
    REQUIRE(cap.records[0].raw_frame.has_value());
    CHECK(*cap.records[0].raw_frame == frame);
}

TEST_CASE("unsupported link types are an input error", "[capture]") {
    std::stringstream buf;
    {
        PcapWriter w(buf, 1);  // ethernet
        w.write(0, Bytes(24, 0));
    }
    buf.seekg(0);
    CHECK_THROWS_AS(read_pcap(buf), FormatError);
}

TEST_CASE("bad pcap magic is an input error", "[capture]") {
    std::stringstream buf("this is not a capture file at all.......");
    CHECK_THROWS_AS(read_pcap(buf), FormatError);
}

TEST_CASE("non-probe frames are counted and skipped", "[capture]") {
    std::stringstream buf;
    {
        PcapWriter w(buf, kLinktypeIeee80211);
        Bytes beacon(32, 0);
        beacon[0] = 0x80;
        w.write(0, beacon);
        w.write(1000000, encode_frame(make_probe(1.0, "02:00:00:00:00:01", 1)));
    }
    buf.seekg(0);
    const Capture cap = read_pcap(buf);
    CHECK(cap.records.size() == 1);
    CHECK(cap.stats.skipped_other == 1);
    CHECK(cap.stats.probes == 1);
}

TEST_CASE("undecodable probe frames are counted with a warning", "[capture]") {
    std::stringstream buf;
    {
        PcapWriter w(buf, kLinktypeIeee80211);
        Bytes runt(10, 0);
        runt[0] = 0x40;  // probe request fc, but shorter than a mac header
        w.write(0, runt);
    }
    buf.seekg(0);
    const Capture cap = read_pcap(buf);
    CHECK(cap.records.empty());
    CHECK(cap.stats.undecodable == 1);
    CHECK_FALSE(cap.warnings.empty());
}

TEST_CASE("malformed record lines are counted and skipped", "[capture]") {
    std::stringstream buf;
    buf << probe_to_json(make_probe(1.0, "02:00:00:00:00:01", 1, "A")).dump() << "\n";
    buf << "{not json}\n";
    buf << probe_to_json(make_probe(2.0, "02:00:00:00:00:02", 2, "B")).dump() << "\n";
    const Capture cap = read_records(buf);
    CHECK(cap.records.size() == 2);
    CHECK(cap.stats.undecodable == 1);
    REQUIRE_FALSE(cap.warnings.empty());
}

TEST_CASE("truncated pcap tail stops the stream without throwing", "[capture]") {
    std::stringstream buf;
    {
        PcapWriter w(buf, kLinktypeIeee80211);
        w.write(0, encode_frame(make_probe(0.0, "02:00:00:00:00:01", 1)));
        w.write(1, encode_frame(make_probe(1.0, "02:00:00:00:00:02", 2)));
    }
    std::string data = buf.str();
    data.resize(data.size() - 5);
    std::stringstream cut(data);
    const Capture cap = read_pcap(cut);
    CHECK(cap.records.size() == 1);
    CHECK_FALSE(cap.warnings.empty());
}

TEST_CASE("records writer emits one json object per line", "[capture]") {
    const auto recs = sample_records();
    std::stringstream buf;
    write_capture(recs, buf, CaptureFormat::Records);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(buf, line)) {
        ++lines;
        CHECK_NOTHROW(Json::parse(line));
    }
    CHECK(lines == recs.size());
}

TEST_CASE("timestamp conversions are exact at microsecond precision", "[capture]") {
    for (Timestamp us : {Timestamp{0}, Timestamp{1}, Timestamp{999999}, Timestamp{1700000000123456},
                         Timestamp{4102444800000000}}) {
        CHECK(ts_from_seconds(ts_to_seconds(us)) == us);
    }
}
