#include "abestore/abe/chain.hpp"

#include "abestore/crypto/aes.hpp"
#include "abestore/errors.hpp"

namespace abestore::abe {

namespace {

Bytes chunk_nonce(uint64_t index) {
    Bytes n(crypto::kGcmNonceLen, 0);
    for (int i = 0; i < 8; ++i) n[4 + i] = uint8_t(index >> (56 - 8 * i));
    return n;
}

}  // namespace

Bytes seal_chunk(std::span<const uint8_t> data_key, uint64_t index,
                 std::span<const uint8_t> plain) {
    return crypto::aes256_gcm_seal(data_key, chunk_nonce(index), {}, plain);
}

Bytes open_chunk(std::span<const uint8_t> data_key, uint64_t index,
                 std::span<const uint8_t> sealed) {
    Bytes out;
    if (!crypto::aes256_gcm_open(data_key, chunk_nonce(index), {}, sealed, out))
        throw AbeDecryptError("chunk " + std::to_string(index) + " authentication failure");
    return out;
}

ChainCiphertext encrypt_chain(const AbeEngine& engine, const AbePublicParams& pk,
                              std::span<const uint8_t> data, policy::PolicyPtr p,
                              RandomSource& rng, uint32_t chunk_size) {
    if (chunk_size == 0) throw ProtocolError(ErrorCode::Malformed, "zero chunk size");
    Bytes data_key = rng.bytes(crypto::kAes256KeyLen);

    ChainCiphertext c;
    c.kem_header = engine.encrypt(pk, data_key, std::move(p), rng);
    c.chunk_size = chunk_size;
    c.plaintext_len = data.size();
    for (size_t off = 0; off < data.size(); off += chunk_size) {
        size_t n = std::min<size_t>(chunk_size, data.size() - off);
        c.chunks.push_back(seal_chunk(data_key, c.chunks.size(), data.subspan(off, n)));
    }
    return c;
}

Bytes chain_data_key(const AbeEngine& engine, const AbePublicParams& pk,
                     const ChainCiphertext& c, const AbePrivateKey& sk) {
    Bytes key = engine.decrypt(pk, c.kem_header, sk);
    if (key.size() != crypto::kAes256KeyLen) throw AbeDecryptError("bad data key length");
    return key;
}

Bytes decrypt_chain_range(const AbeEngine& engine, const AbePublicParams& pk,
                          const ChainCiphertext& c, const AbePrivateKey& sk, size_t first,
                          size_t count) {
    if (first + count < first || first + count > c.chunks.size())
        throw ProtocolError(ErrorCode::RangeOutOfBounds, "chunk range out of bounds");
    Bytes key = chain_data_key(engine, pk, c, sk);
    Bytes out;
    for (size_t i = first; i < first + count; ++i) {
        Bytes plain = open_chunk(key, i, c.chunks[i]);
        out.insert(out.end(), plain.begin(), plain.end());
    }
    return out;
}

Bytes decrypt_chain(const AbeEngine& engine, const AbePublicParams& pk,
                    const ChainCiphertext& c, const AbePrivateKey& sk) {
    Bytes out = decrypt_chain_range(engine, pk, c, sk, 0, c.chunks.size());
    if (out.size() != c.plaintext_len) throw AbeDecryptError("plaintext length mismatch");
    return out;
}

}  // namespace abestore::abe
