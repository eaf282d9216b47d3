#include <random>

#include "test_util.hpp"

using namespace pktest;

TEST_CASE("encode then decode preserves every probe field", "[frame]") {
    ProbeRequest p = with_wps(make_probe(12.345678, "da:a1:19:01:02:03", 0x0abc, "HomeNet",
                                         {{ie::kHtCapabilities, {0xef, 0x01}}}),
                              "00112233445566778899aabbccddeeff", "Phone");
    const Bytes frame = encode_frame(p);
    REQUIRE(frame.size() >= kMacHeaderLen);
    CHECK(is_probe_request_frame(frame));

    const auto decoded = decode_frame(frame, p.timestamp);
    REQUIRE(decoded.has_value());
    CHECK_FALSE(decoded->truncated);
    CHECK(decoded->probe == p);
}

TEST_CASE("re-encoding a decoded frame is byte-identical", "[frame]") {
    ProbeRequest p = make_probe(1.0, "f8:e4:3b:aa:bb:cc", 77, "Cafe");
    const Bytes frame = encode_frame(p);
    const auto decoded = decode_frame(frame, p.timestamp);
    REQUIRE(decoded.has_value());
    CHECK(encode_frame(decoded->probe) == frame);
}

TEST_CASE("sequence control is little-endian with the counter in the top 12 bits", "[frame]") {
    ProbeRequest p = make_probe(0.0, "02:00:00:00:00:01", 0x123);
    const Bytes frame = encode_frame(p);
    // seqctl = sn << 4 = 0x1230, stored little-endian.
    CHECK(frame[22] == 0x30);
    CHECK(frame[23] == 0x12);

    Bytes alt = frame;
    alt[22] = 0x34;  // fragment bits set; decoder must still report sn 0x123
    const auto decoded = decode_frame(alt, 0);
    REQUIRE(decoded.has_value());
    CHECK(decoded->probe.sequence_number == 0x123);
}

TEST_CASE("source mac is read from address 2", "[frame]") {
    ProbeRequest p = make_probe(0.0, "aa:bb:cc:dd:ee:0f", 1);
    const Bytes frame = encode_frame(p);
    const Bytes addr2(frame.begin() + 10, frame.begin() + 16);
    CHECK(hex_encode(addr2) == "aabbccddee0f");
}

TEST_CASE("empty or missing ssid element decodes as wildcard", "[frame]") {
    ProbeRequest wildcard = make_probe(0.0, "02:00:00:00:00:01", 1);
    const auto d1 = decode_frame(encode_frame(wildcard), 0);
    REQUIRE(d1.has_value());
    CHECK_FALSE(d1->probe.ssid.has_value());
    CHECK(is_wildcard(d1->probe));

    // A frame whose IEs omit the SSID element entirely.
    ProbeRequest no_ssid_elem = wildcard;
    no_ssid_elem.elements.erase(no_ssid_elem.elements.begin());
    no_ssid_elem.ssid.reset();
    const auto d2 = decode_frame(encode_frame(no_ssid_elem), 0);
    REQUIRE(d2.has_value());
    CHECK_FALSE(d2->probe.ssid.has_value());
}

TEST_CASE("frames shorter than the mac header do not decode", "[frame]") {
    Bytes tiny(kMacHeaderLen - 1, 0x40);
    CHECK_FALSE(decode_frame(tiny, 0).has_value());
    Bytes exact(kMacHeaderLen, 0);
    exact[0] = kProbeRequestFc0;
    const auto d = decode_frame(exact, 0);
    REQUIRE(d.has_value());
    CHECK(d->probe.elements.empty());
}

TEST_CASE("element overrunning the frame end sets the truncation flag", "[frame]") {
    ProbeRequest p = make_probe(0.0, "02:00:00:00:00:01", 1, "Net");
    Bytes frame = encode_frame(p);
    frame.resize(frame.size() - 2);  // cut the last element short
    const auto d = decode_frame(frame, 0);
    REQUIRE(d.has_value());
    CHECK(d->truncated);
}

TEST_CASE("probe request type check looks at the frame control byte", "[frame]") {
    Bytes beacon(kMacHeaderLen, 0);
    beacon[0] = 0x80;
    CHECK_FALSE(is_probe_request_frame(beacon));
    beacon[0] = 0x40;
    CHECK(is_probe_request_frame(beacon));
    CHECK_FALSE(is_probe_request_frame(Bytes{}));
}

TEST_CASE("encode rejects oversized element payloads", "[frame]") {
    ProbeRequest p = make_probe(0.0, "02:00:00:00:00:01", 1);
    p.elements.push_back({ie::kVendorSpecific, Bytes(256, 0xaa)});
    CHECK_THROWS_AS(encode_frame(p), std::invalid_argument);
}

TEST_CASE("radiotap header is skipped by declared length", "[frame]") {
    // 8-byte header, no fields present.
    Bytes rt = {0x00, 0x00, 0x08, 0x00, 0x00, 0x00, 0x00, 0x00};
    auto info = parse_radiotap(rt);
    REQUIRE(info.has_value());
    CHECK(info->header_len == 8);
    CHECK_FALSE(info->fcs_present);
}

TEST_CASE("radiotap flags field reports an fcs", "[frame]") {
    // present = TSFT(bit0) | FLAGS(bit1); TSFT forces 8-byte alignment, so
    // the flags byte sits at offset 16 after the 8-byte TSFT.
    Bytes rt(18, 0);
    rt[0] = 0;
    rt[2] = 18;  // header length
    rt[4] = 0x03;  // present: TSFT | FLAGS
    rt[16] = 0x10;  // flags: FCS at end
    auto info = parse_radiotap(rt);
    REQUIRE(info.has_value());
    CHECK(info->header_len == 18);
    CHECK(info->fcs_present);
}

TEST_CASE("radiotap chained present words are followed", "[frame]") {
    // Two present words (ext bit 31 set in the first), then FLAGS data.
    Bytes rt(14, 0);
    rt[2] = 14;
    rt[4] = 0x02;  // FLAGS present
    rt[7] = 0x80;  // ext bit -> one more present word
    // second present word = 0 (bytes 8..11); flags byte at 12
    rt[12] = 0x10;
    auto info = parse_radiotap(rt);
    REQUIRE(info.has_value());
    CHECK(info->fcs_present);
}

TEST_CASE("malformed radiotap headers are rejected", "[frame]") {
    CHECK_FALSE(parse_radiotap(Bytes{0, 0, 4, 0}).has_value());          // too short
    CHECK_FALSE(parse_radiotap(Bytes{1, 0, 8, 0, 0, 0, 0, 0}).has_value());  // bad version
    Bytes overrun = {0x00, 0x00, 0xff, 0x00, 0x00, 0x00, 0x00, 0x00};
    CHECK_FALSE(parse_radiotap(overrun).has_value());  // declared length > packet
}

TEST_CASE("decoder never crashes on random bytes", "[frame][property]") {
    std::mt19937_64 rng(0xfeedface);
    for (int trial = 0; trial < 2000; ++trial) {
        Bytes frame(rng() % 128);
        for (auto& b : frame) b = static_cast<std::uint8_t>(rng());
        if (!frame.empty()) frame[0] = 0x40;
        const auto d = decode_frame(frame, 0);
        if (d.has_value()) {
            // Whatever decoded must re-encode without throwing.
            CHECK_NOTHROW(encode_frame(d->probe));
        }
        Bytes rt(rng() % 64);
        for (auto& b : rt) b = static_cast<std::uint8_t>(rng());
        (void)parse_radiotap(rt);
    }
}
