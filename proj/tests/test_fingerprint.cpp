#include <map>
#include <random>

#include "test_util.hpp"

using namespace pktest;

namespace {

// NIST test vectors.
constexpr const char* kSha512Empty =
    "cf83e1357eefb8bdf1542850d66d8007d620e4050b5715dc83f4a921d36ce9ce"
    "47d0d13c5d85f2b0ff8318d2877eec2f63b931bd47417a81a538327af927da3e";
constexpr const char* kSha512Abc =
    "ddaf35a193617abacc417349ae20413112e6fa4e89a97ea20a9eeee64b55d39a"
    "2192992a274fc1a836ba3c23a3feebbd454d4423643ce80e2a9ac94fa54ca49f";

InformationElement ht(std::uint8_t fill = 0x11) {
    return {ie::kHtCapabilities, Bytes(26, fill)};
}

InformationElement vendor(std::initializer_list<std::uint8_t> payload) {
    return {ie::kVendorSpecific, Bytes(payload)};
}

}  // anonymous namespace

TEST_CASE("sha512 matches published vectors", "[fingerprint]") {
    CHECK(hex_encode(sha512(Bytes{}).data(), 64) == kSha512Empty);
    CHECK(hex_encode(sha512(bytes("abc")).data(), 64) == kSha512Abc);
}

TEST_CASE("hmac-sha256 matches rfc 4231 case 2", "[fingerprint]") {
    const Bytes key = bytes("Jefe");
    const Bytes msg = bytes("what do ya want for nothing?");
    const auto mac = hmac_sha256(key.data(), key.size(), msg);
    CHECK(hex_encode(mac.data(), mac.size()) ==
          "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST_CASE("fingerprint serializes stable elements as tag, length, payload", "[fingerprint]") {
    ProbeRequest p;
    p.elements.push_back(ht(0xab));
    Bytes canon = {ie::kHtCapabilities, 26};
    canon.insert(canon.end(), 26, 0xab);
    CHECK(fingerprint(p).digest == sha512(canon));
}

TEST_CASE("a probe with no stable elements hashes the empty string", "[fingerprint]") {
    ProbeRequest p;
    p.elements.push_back({ie::kSsid, bytes("OnlySsid")});
    p.elements.push_back({3, {6}});  // DS parameter set: channel, varies per scan
    CHECK(fingerprint_hex(fingerprint(p)) == kSha512Empty);
}

TEST_CASE("mac, sequence number, timestamp, and ssid do not affect the digest", "[fingerprint]") {
    const auto base = make_probe(1.0, "02:00:00:00:00:01", 1, "NetA", {ht()});
    auto other = make_probe(999.0, "f8:e4:3b:99:88:77", 4000, "NetB", {ht()});
    CHECK(fingerprint(base) == fingerprint(other));

    auto wildcard = make_probe(5.0, "da:00:00:00:00:02", 7, std::nullopt, {ht()});
    CHECK(fingerprint(base) == fingerprint(wildcard));
}

TEST_CASE("unstable elements do not affect the digest", "[fingerprint]") {
    auto plain = make_probe(0.0, "02:00:00:00:00:01", 1, "N", {ht()});
    auto noisy = make_probe(0.0, "02:00:00:00:00:01", 1, "N", {ht()});
    noisy.elements.push_back({3, {11}});          // DS parameter set
    noisy.elements.push_back({10, {0x01}});       // request info
    noisy.elements.push_back({114, {1, 2, 3}});   // mesh id
    CHECK(fingerprint(plain) == fingerprint(noisy));
}

TEST_CASE("stable payload bytes change the digest", "[fingerprint]") {
    const auto a = make_probe(0.0, "02:00:00:00:00:01", 1, "N", {ht(0x00)});
    const auto b = make_probe(0.0, "02:00:00:00:00:01", 1, "N", {ht(0x01)});
    CHECK_FALSE(fingerprint(a) == fingerprint(b));

    const auto c = make_probe(0.0, "02:00:00:00:00:01", 1, "N",
                              {{ie::kExtCapabilities, {0x04}}});
    const auto d = make_probe(0.0, "02:00:00:00:00:01", 1, "N",
                              {{ie::kExtCapabilities, {0x04, 0x00}}});
    CHECK_FALSE(fingerprint(c) == fingerprint(d));
}

TEST_CASE("element order is part of the fingerprint", "[fingerprint]") {
    const auto v1 = vendor({0x00, 0x10, 0x18, 0x02, 0x00});
    const auto v2 = vendor({0x00, 0x17, 0xf2, 0x0a, 0x01});
    const auto a = make_probe(0.0, "02:00:00:00:00:01", 1, "N", {v1, v2});
    const auto b = make_probe(0.0, "02:00:00:00:00:01", 1, "N", {v2, v1});
    CHECK_FALSE(fingerprint(a) == fingerprint(b));
}

TEST_CASE("wps identity attributes are excluded from the digest", "[fingerprint]") {
    const auto base = make_probe(0.0, "02:00:00:00:00:01", 1, "N", {ht()});
    const auto w1 = with_wps(base, "00112233445566778899aabbccddeeff", "Alpha");
    const auto w2 = with_wps(base, "ffeeddccbbaa99887766554433221100", "Beta");
    CHECK(fingerprint(w1) == fingerprint(w2));
    // Presence of the WPS element itself is still part of the digest.
    CHECK_FALSE(fingerprint(w1) == fingerprint(base));
}

TEST_CASE("non-identity wps attributes are included in the digest", "[fingerprint]") {
    auto mk = [](std::uint8_t version) {
        WpsInfo info;
        info.uuid_e = uuid16("00112233445566778899aabbccddeeff");
        Bytes payload = build_wps_payload(info);
        payload[8] = version;  // version attribute value byte
        return make_probe(0.0, "02:00:00:00:00:01", 1, "N",
                          {{ie::kVendorSpecific, payload}});
    };
    CHECK_FALSE(fingerprint(mk(0x10)) == fingerprint(mk(0x20)));
}

TEST_CASE("field presence bits track the stable elements", "[fingerprint]") {
    const auto p = with_wps(
        make_probe(0.0, "02:00:00:00:00:01", 1, "N",
                   {ht(), {ie::kVhtCapabilities, Bytes(12, 1)}, {ie::kExtCapabilities, {0x04}}}),
        "00112233445566778899aabbccddeeff");
    const auto fp = fingerprint(p);
    CHECK((fp.field_presence & field::kSupportedRates) != 0);
    CHECK((fp.field_presence & field::kExtRates) != 0);
    CHECK((fp.field_presence & field::kHtCap) != 0);
    CHECK((fp.field_presence & field::kVhtCap) != 0);
    CHECK((fp.field_presence & field::kExtCap) != 0);
    CHECK((fp.field_presence & field::kVendorSpecific) != 0);
    CHECK((fp.field_presence & field::kWps) != 0);

    ProbeRequest bare;
    CHECK(fingerprint(bare).field_presence == 0);
}

TEST_CASE("fingerprint hex is 128 lowercase hex chars", "[fingerprint]") {
    const auto hex = fingerprint_hex(fingerprint(make_probe(0.0, "02:00:00:00:00:01", 1)));
    REQUIRE(hex.size() == 128);
    for (char c : hex) CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
}

TEST_CASE("ie statistics count probes, not elements", "[fingerprint]") {
    std::vector<ProbeRequest> probes;
    // two vendor elements in one probe count once in the vendor row
    probes.push_back(make_probe(0.0, "02:00:00:00:00:01", 1, "A",
                                {vendor({0, 1, 2, 3}), vendor({4, 5, 6, 7})}));
    probes.push_back(make_probe(1.0, "02:00:00:00:00:02", 2, "B", {ht()}));
    probes.push_back(with_wps(make_probe(2.0, "02:00:00:00:00:03", 3),
                              "00112233445566778899aabbccddeeff"));
    probes.push_back(make_probe(3.0, "02:00:00:00:00:04", 4));

    const auto stats = ie_statistics(probes);
    CHECK(stats.total_probes == 4);

    std::map<std::string, std::uint64_t> by_label;
    for (const auto& r : stats.rows) by_label[r.label] = r.count;
    CHECK(by_label.at("Supported Rates") == 4);
    CHECK(by_label.at("Extended Supported Rates") == 4);
    CHECK(by_label.at("HT Capabilities") == 1);
    CHECK(by_label.at("VHT Capabilities") == 0);
    CHECK(by_label.at("Vendor Specific Elements") == 2);
    CHECK(by_label.at("2 Vendor Specific Element") == 1);
    CHECK(by_label.at("1 Vendor Specific Element") == 1);
    CHECK(by_label.at("WPS - UUID-E") == 1);
}

TEST_CASE("vendor histogram rows sum to the vendor row", "[fingerprint]") {
    std::mt19937_64 rng(42);
    std::vector<ProbeRequest> probes;
    for (int i = 0; i < 200; ++i) {
        std::vector<InformationElement> extra;
        const auto n = rng() % 5;
        for (std::uint64_t k = 0; k < n; ++k) extra.push_back(vendor({0, 1, 2, static_cast<std::uint8_t>(k)}));
        probes.push_back(make_probe(i, "02:00:00:00:00:01", i % 4096, "S", std::move(extra)));
    }
    const auto stats = ie_statistics(probes);
    std::uint64_t vendor_row = 0, hist_sum = 0;
    for (const auto& r : stats.rows) {
        if (r.label == "Vendor Specific Elements") vendor_row = r.count;
        if (r.label.find(" Vendor Specific Element") != std::string::npos &&
            r.label != "Vendor Specific Elements")
            hist_sum += r.count;
    }
    CHECK(hist_sum == vendor_row);
}

TEST_CASE("statistics render as text and csv", "[fingerprint]") {
    std::vector<ProbeRequest> probes = {make_probe(0.0, "02:00:00:00:00:01", 1, "A", {ht()})};
    const auto stats = ie_statistics(probes);

    const std::string text = format_ie_statistics_text(stats);
    CHECK(text.find("Information Element") != std::string::npos);
    CHECK(text.find("Total Collected Probe Requests") != std::string::npos);
    CHECK(text.find("HT Capabilities") != std::string::npos);

    const std::string csv = format_ie_statistics_csv(stats);
    CHECK(csv.rfind("field,count,percent\n", 0) == 0);
    CHECK(csv.find("HT Capabilities,1,100.00") != std::string::npos);
    CHECK(csv.find("VHT Capabilities,0,0.00") != std::string::npos);
}

TEST_CASE("statistics on an empty capture are all zero", "[fingerprint]") {
    const auto stats = ie_statistics(std::vector<ProbeRequest>{});
    CHECK(stats.total_probes == 0);
    for (const auto& r : stats.rows) {
        CHECK(r.count == 0);
        CHECK(r.percent == 0.0);
    }
}
