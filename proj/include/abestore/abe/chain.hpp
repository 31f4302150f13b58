#pragma once

#include "abestore/abe/engine.hpp"

namespace abestore::abe {

// Hybrid (KEM/DEM) mode for variable-length data: a fresh 32-byte data key
// is encapsulated under the ABE engine, the payload travels in fixed-size
// AES-256-GCM chunks keyed by it (nonce = big-endian chunk index, so
// chunks cannot be reordered or transplanted).

ChainCiphertext encrypt_chain(const AbeEngine& engine, const AbePublicParams& pk,
                              std::span<const uint8_t> data, policy::PolicyPtr p,
                              RandomSource& rng, uint32_t chunk_size = kDefaultChunkSize);

Bytes decrypt_chain(const AbeEngine& engine, const AbePublicParams& pk,
                    const ChainCiphertext& c, const AbePrivateKey& sk);

// Plaintext of chunks [first, first+count).  Throws RangeOutOfBounds past
// the end; a per-chunk tag failure names the offending chunk index.
Bytes decrypt_chain_range(const AbeEngine& engine, const AbePublicParams& pk,
                          const ChainCiphertext& c, const AbePrivateKey& sk, size_t first,
                          size_t count);

// Recover just the encapsulated data key (used by nodes that re-wrap
// chunks during range writes).
Bytes chain_data_key(const AbeEngine& engine, const AbePublicParams& pk,
                     const ChainCiphertext& c, const AbePrivateKey& sk);

// Chunk-level helpers shared with the range-write path.
Bytes seal_chunk(std::span<const uint8_t> data_key, uint64_t index, std::span<const uint8_t> plain);
Bytes open_chunk(std::span<const uint8_t> data_key, uint64_t index, std::span<const uint8_t> sealed);

}  // namespace abestore::abe
