#include <map>

#include "test_util.hpp"

using namespace pktest;

namespace {

const AnonymizationKey kKeyA = AnonymizationKey::from_hex("000102030405060708090a0b0c0d0e0f");
const AnonymizationKey kKeyB = AnonymizationKey::from_hex("ffeeddccbbaa99887766554433221100");

ProbeRequest rich_probe() {
    auto p = make_probe(12.5, "f8:e4:3b:12:34:56", 777, "CoffeeShop");
    return with_wps(std::move(p), "00112233445566778899aabbccddeeff", "Pixel 7");
}

}  // anonymous namespace

TEST_CASE("mac oui and functional bits survive, the tail does not", "[anonymize]") {
    for (const char* s : {"f8:e4:3b:12:34:56", "da:a1:19:00:00:01", "ff:ff:ff:ff:ff:ff"}) {
        const ProbeRequest p = make_probe(0.0, s, 1);
        const ProbeRequest a = anonymize_probe(p, kKeyA);
        CHECK(a.mac.octets[0] == p.mac.octets[0]);
        CHECK(a.mac.octets[1] == p.mac.octets[1]);
        CHECK(a.mac.octets[2] == p.mac.octets[2]);
        CHECK(classify_mac(a.mac) == classify_mac(p.mac));
        if (classify_mac(p.mac) != MacClass::Group) {
            CHECK(a.mac != p.mac);
        }
    }
}

TEST_CASE("equal salts give equal output, different salts do not", "[anonymize]") {
    const ProbeRequest p = rich_probe();
    const ProbeRequest a1 = anonymize_probe(p, kKeyA);
    const ProbeRequest a2 = anonymize_probe(p, kKeyA);
    const ProbeRequest b = anonymize_probe(p, kKeyB);
    CHECK(a1 == a2);
    CHECK(a1.mac != b.mac);
    CHECK(a1.ssid != b.ssid);
    CHECK(a1.wps->uuid_e != b.wps->uuid_e);
}

TEST_CASE("equal plaintext maps to equal tokens within a run", "[anonymize]") {
    const ProbeRequest p1 = make_probe(0.0, "02:aa:bb:01:02:03", 1, "HomeNet");
    const ProbeRequest p2 = make_probe(9.0, "02:aa:bb:01:02:03", 2, "HomeNet");
    const ProbeRequest a1 = anonymize_probe(p1, kKeyA);
    const ProbeRequest a2 = anonymize_probe(p2, kKeyA);
    CHECK(a1.mac == a2.mac);
    CHECK(a1.ssid == a2.ssid);

    const ProbeRequest p3 = make_probe(0.0, "02:aa:bb:01:02:04", 1, "OtherNet");
    const ProbeRequest a3 = anonymize_probe(p3, kKeyA);
    CHECK(a3.mac != a1.mac);
    CHECK(a3.ssid != a1.ssid);
}

TEST_CASE("token lengths are fixed", "[anonymize]") {
    const ProbeRequest a = anonymize_probe(rich_probe(), kKeyA);
    REQUIRE(a.ssid.has_value());
    CHECK(a.ssid->size() == kSsidTokenLen);
    REQUIRE(a.wps.has_value());
    REQUIRE(a.wps->uuid_e.has_value());
    REQUIRE(a.wps->device_name.has_value());
    CHECK(a.wps->device_name->size() == kWpsTokenLen);
}

TEST_CASE("wildcard probes stay wildcard", "[anonymize]") {
    const ProbeRequest p = make_probe(0.0, "02:00:00:00:00:01", 1);
    const ProbeRequest a = anonymize_probe(p, kKeyA);
    CHECK_FALSE(a.ssid.has_value());
    REQUIRE_FALSE(a.elements.empty());
    CHECK(a.elements[0].tag == ie::kSsid);
    CHECK(a.elements[0].payload.empty());
}

TEST_CASE("sequence numbers, timestamps, and element structure are untouched", "[anonymize]") {
    const ProbeRequest p = rich_probe();
    const ProbeRequest a = anonymize_probe(p, kKeyA);
    CHECK(a.sequence_number == p.sequence_number);
    CHECK(a.timestamp == p.timestamp);
    REQUIRE(a.elements.size() == p.elements.size());
    for (std::size_t i = 0; i < p.elements.size(); ++i) CHECK(a.elements[i].tag == p.elements[i].tag);
}

TEST_CASE("ssid element payload matches the ssid field after anonymization", "[anonymize]") {
    const ProbeRequest a = anonymize_probe(rich_probe(), kKeyA);
    REQUIRE(a.ssid.has_value());
    CHECK(a.elements[0].payload == *a.ssid);
}

TEST_CASE("fingerprint is invariant under anonymization", "[anonymize]") {
    std::vector<ProbeRequest> probes;
    probes.push_back(rich_probe());
    probes.push_back(make_probe(1.0, "da:11:22:33:44:55", 17, "Net",
                                {{ie::kHtCapabilities, Bytes(26, 0x5a)},
                                 {ie::kVendorSpecific, {0x00, 0x10, 0x18, 0x02, 0x01, 0xff}}}));
    probes.push_back(make_probe(2.0, "02:00:00:00:00:09", 3));
    for (const auto& p : probes) {
        const ProbeRequest a = anonymize_probe(p, kKeyA);
        CHECK(fingerprint(a) == fingerprint(p));
        CHECK(fingerprint(a).field_presence == fingerprint(p).field_presence);
    }
}

TEST_CASE("non-identity wps attributes are byte-identical", "[anonymize]") {
    const ProbeRequest p = rich_probe();
    const ProbeRequest a = anonymize_probe(p, kKeyA);

    auto collect = [](const ProbeRequest& pr) {
        std::map<std::uint16_t, Bytes> attrs;
        for (const auto& el : pr.elements) {
            if (!is_wps_element(el)) continue;
            walk_wps_attrs(el.payload, [&](std::uint16_t type, const std::uint8_t* val, std::uint16_t len) {
                attrs[type] = Bytes(val, val + len);
            });
        }
        return attrs;
    };
    const auto before = collect(p);
    const auto after = collect(a);
    REQUIRE(before.size() == after.size());
    for (const auto& [type, val] : before) {
        REQUIRE(after.count(type) == 1);
        if (is_wps_identity_attr(type)) {
            CHECK(after.at(type) != val);
        } else {
            CHECK(after.at(type) == val);
        }
    }
}

TEST_CASE("rewritten wps element parses back to the replacement identity", "[anonymize]") {
    const ProbeRequest a = anonymize_probe(rich_probe(), kKeyA);
    bool found = false;
    for (const auto& el : a.elements) {
        if (!is_wps_element(el)) continue;
        found = true;
        const auto parsed = parse_wps(el);
        REQUIRE(parsed.has_value());
        CHECK(parsed->uuid_e == a.wps->uuid_e);
        CHECK(parsed->device_name == a.wps->device_name);
    }
    CHECK(found);
}

TEST_CASE("capture anonymization drops raw frames and keeps order", "[anonymize]") {
    std::vector<CaptureRecord> recs;
    for (int i = 0; i < 5; ++i) {
        ProbeRequest p = make_probe(i, "02:00:00:00:00:0" + std::to_string(i + 1), i);
        recs.push_back({p, encode_frame(p)});
    }
    const auto anon = anonymize_capture(recs, kKeyA);
    REQUIRE(anon.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK_FALSE(anon[i].raw_frame.has_value());
        CHECK(anon[i].probe.timestamp == recs[i].probe.timestamp);
        CHECK(anon[i].probe == anonymize_probe(recs[i].probe, kKeyA));
    }
}

TEST_CASE("anonymized probes re-encode to parseable frames", "[anonymize]") {
    const ProbeRequest a = anonymize_probe(rich_probe(), kKeyA);
    const Bytes frame = encode_frame(a);
    const auto back = decode_frame(frame, a.timestamp);
    REQUIRE(back.has_value());
    CHECK(back->probe == a);
}

TEST_CASE("salt parsing validates its input", "[anonymize]") {
    CHECK_THROWS_AS(AnonymizationKey::from_hex("abcd"), ConfigError);
    CHECK_THROWS_AS(AnonymizationKey::from_hex(std::string(33, 'a')), ConfigError);
    CHECK_THROWS_AS(AnonymizationKey::from_hex("zz102030405060708090a0b0c0d0e0f0"), std::invalid_argument);
    const auto key = AnonymizationKey::from_hex("00000000000000000000000000000001");
    CHECK(key.salt[15] == 1);
    CHECK(key.salt[0] == 0);
}

TEST_CASE("random keys differ between draws", "[anonymize]") {
    const auto k1 = AnonymizationKey::random();
    const auto k2 = AnonymizationKey::random();
    CHECK(k1.salt != k2.salt);
}
