#include "abestore/crypto/sha.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <stdexcept>

namespace abestore::crypto {

Bytes sha256(std::span<const uint8_t> data) {
    Bytes out(kSha256Len);
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) ||
        len != kSha256Len)
        throw std::runtime_error("sha256 failed");
    return out;
}

Sha256::Sha256() {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || !EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr))
        throw std::runtime_error("sha256 init failed");
    ctx_ = ctx;
}

Sha256::~Sha256() { EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_)); }

void Sha256::update(std::span<const uint8_t> data) {
    if (!EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), data.data(), data.size()))
        throw std::runtime_error("sha256 update failed");
}

Bytes Sha256::finish() {
    Bytes out(kSha256Len);
    unsigned int len = 0;
    if (!EVP_DigestFinal_ex(static_cast<EVP_MD_CTX*>(ctx_), out.data(), &len) || len != kSha256Len)
        throw std::runtime_error("sha256 final failed");
    return out;
}

Bytes hmac_sha256(std::span<const uint8_t> key, std::span<const uint8_t> data) {
    Bytes out(kSha256Len);
    unsigned int len = 0;
    if (!HMAC(EVP_sha256(), key.data(), int(key.size()), data.data(), data.size(), out.data(),
              &len) ||
        len != kSha256Len)
        throw std::runtime_error("hmac failed");
    return out;
}

Bytes hkdf(std::span<const uint8_t> ikm, std::span<const uint8_t> salt, std::string_view info,
           size_t out_len) {
    // Extract
    Bytes prk = hmac_sha256(salt, ikm);
    // Expand
    Bytes out;
    out.reserve(out_len);
    Bytes t;
    uint8_t ctr = 1;
    while (out.size() < out_len) {
        Bytes block = t;
        block.insert(block.end(), info.begin(), info.end());
        block.push_back(ctr++);
        t = hmac_sha256(prk, block);
        size_t take = std::min(t.size(), out_len - out.size());
        out.insert(out.end(), t.begin(), t.begin() + take);
    }
    return out;
}

}  // namespace abestore::crypto
