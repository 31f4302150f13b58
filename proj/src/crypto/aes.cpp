#include "abestore/crypto/aes.hpp"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace abestore::crypto {

namespace {

struct CtxDeleter {
    void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using CtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter>;

CtxPtr make_ctx() {
    CtxPtr ctx(EVP_CIPHER_CTX_new());
    if (!ctx) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
    return ctx;
}

}  // namespace

Bytes aes256_ctr(std::span<const uint8_t> key, std::span<const uint8_t> iv,
                 std::span<const uint8_t> data) {
    if (key.size() != kAes256KeyLen || iv.size() != kAesIvLen)
        throw std::invalid_argument("bad aes-ctr key/iv length");
    CtxPtr ctx = make_ctx();
    if (!EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_ctr(), nullptr, key.data(), iv.data()))
        throw std::runtime_error("aes-ctr init failed");
    Bytes out(data.size());
    int len = 0;
    if (!data.empty() &&
        !EVP_EncryptUpdate(ctx.get(), out.data(), &len, data.data(), int(data.size())))
        throw std::runtime_error("aes-ctr update failed");
    return out;
}

Bytes aes256_gcm_seal(std::span<const uint8_t> key, std::span<const uint8_t> nonce,
                      std::span<const uint8_t> aad, std::span<const uint8_t> plaintext) {
    if (key.size() != kAes256KeyLen || nonce.size() != kGcmNonceLen)
        throw std::invalid_argument("bad aes-gcm key/nonce length");
    CtxPtr ctx = make_ctx();
    if (!EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()))
        throw std::runtime_error("aes-gcm init failed");
    int len = 0;
    if (!aad.empty() && !EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), int(aad.size())))
        throw std::runtime_error("aes-gcm aad failed");
    Bytes out(plaintext.size() + kGcmTagLen);
    if (!plaintext.empty() &&
        !EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(), int(plaintext.size())))
        throw std::runtime_error("aes-gcm update failed");
    if (!EVP_EncryptFinal_ex(ctx.get(), out.data() + plaintext.size(), &len))
        throw std::runtime_error("aes-gcm final failed");
    if (!EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kGcmTagLen,
                             out.data() + plaintext.size()))
        throw std::runtime_error("aes-gcm tag failed");
    return out;
}

bool aes256_gcm_open(std::span<const uint8_t> key, std::span<const uint8_t> nonce,
                     std::span<const uint8_t> aad, std::span<const uint8_t> sealed, Bytes& out) {
    if (key.size() != kAes256KeyLen || nonce.size() != kGcmNonceLen)
        throw std::invalid_argument("bad aes-gcm key/nonce length");
    if (sealed.size() < kGcmTagLen) return false;
    size_t ct_len = sealed.size() - kGcmTagLen;
    CtxPtr ctx = make_ctx();
    if (!EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()))
        throw std::runtime_error("aes-gcm init failed");
    int len = 0;
    if (!aad.empty() && !EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), int(aad.size())))
        throw std::runtime_error("aes-gcm aad failed");
    out.assign(ct_len, 0);
    if (ct_len > 0 && !EVP_DecryptUpdate(ctx.get(), out.data(), &len, sealed.data(), int(ct_len)))
        return false;
    uint8_t tag[kGcmTagLen];
    std::memcpy(tag, sealed.data() + ct_len, kGcmTagLen);
    if (!EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kGcmTagLen, tag))
        throw std::runtime_error("aes-gcm set tag failed");
    if (EVP_DecryptFinal_ex(ctx.get(), out.data() + ct_len, &len) != 1) {
        out.clear();
        return false;
    }
    return true;
}

void aes256_block(std::span<const uint8_t> key, const uint8_t in[16], uint8_t out[16]) {
    if (key.size() != kAes256KeyLen) throw std::invalid_argument("bad aes key length");
    CtxPtr ctx = make_ctx();
    if (!EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_ecb(), nullptr, key.data(), nullptr))
        throw std::runtime_error("aes-ecb init failed");
    EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
    int len = 0;
    if (!EVP_EncryptUpdate(ctx.get(), out, &len, in, 16) || len != 16)
        throw std::runtime_error("aes-ecb block failed");
}

}  // namespace abestore::crypto
