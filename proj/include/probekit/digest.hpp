#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

#include <openssl/evp.h>

#include "probekit/bytes.hpp"

namespace probekit {

using Sha512Digest = std::array<std::uint8_t, 64>;

inline Sha512Digest sha512(const std::uint8_t* data, std::size_t len) {
    Sha512Digest out{};
    unsigned int out_len = 0;
    if (EVP_Digest(data, len, out.data(), &out_len, EVP_sha512(), nullptr) != 1 || out_len != out.size())
        throw std::runtime_error("SHA-512 failed");
    return out;
}

inline Sha512Digest sha512(const Bytes& data) {
    return sha512(data.data(), data.size());
}

// HMAC-SHA-256, truncated by the caller. Used only by the anonymizer.
inline std::array<std::uint8_t, 32> hmac_sha256(const std::uint8_t* key, std::size_t key_len,
                                                const Bytes& msg) {
    std::array<std::uint8_t, 32> out{};
    std::size_t out_len = out.size();
    EVP_MAC* mac = EVP_MAC_fetch(nullptr, "HMAC", nullptr);
    if (!mac) throw std::runtime_error("HMAC fetch failed");
    EVP_MAC_CTX* ctx = EVP_MAC_CTX_new(mac);
    EVP_MAC_free(mac);
    if (!ctx) throw std::runtime_error("HMAC ctx failed");
    char digest_name[] = "SHA256";
    OSSL_PARAM params[] = {
        OSSL_PARAM_construct_utf8_string("digest", digest_name, 0),
        OSSL_PARAM_construct_end(),
    };
    bool ok = EVP_MAC_init(ctx, key, key_len, params) == 1 &&
              EVP_MAC_update(ctx, msg.data(), msg.size()) == 1 &&
              EVP_MAC_final(ctx, out.data(), &out_len, out.size()) == 1;
    EVP_MAC_CTX_free(ctx);
    if (!ok || out_len != out.size())
        throw std::runtime_error("HMAC-SHA-256 failed");
    return out;
}

}  // namespace probekit
