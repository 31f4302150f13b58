#include "abestore/rng.hpp"

#include <fstream>
#include <stdexcept>

#include "abestore/crypto/sha.hpp"

namespace abestore {

uint64_t RandomSource::below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("below(0)");
    // Rejection sampling to stay uniform.
    uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    uint64_t v;
    do {
        v = u64();
    } while (v >= limit);
    return v % bound;
}

void SystemRandom::fill(std::span<uint8_t> out) {
    static thread_local std::ifstream urandom("/dev/urandom", std::ios::binary);
    if (!urandom.read(reinterpret_cast<char*>(out.data()), std::streamsize(out.size())))
        throw std::runtime_error("failed to read /dev/urandom");
}

Drbg::Drbg(std::span<const uint8_t> seed) { state_ = crypto::sha256(seed); }

Drbg::Drbg(uint64_t seed) {
    ByteWriter w;
    w.str("abestore-drbg-seed");
    w.u64(seed);
    state_ = crypto::sha256(w.bytes());
}

void Drbg::fill(std::span<uint8_t> out) {
    size_t off = 0;
    while (off < out.size()) {
        ByteWriter w;
        w.raw(state_);
        w.u64(counter_++);
        Bytes block = crypto::sha256(w.bytes());
        size_t take = std::min(block.size(), out.size() - off);
        std::memcpy(out.data() + off, block.data(), take);
        off += take;
    }
}

Drbg Drbg::fork(std::string_view label) const {
    ByteWriter w;
    w.raw(state_);
    w.str("fork");
    w.str(label);
    Bytes seed = crypto::sha256(w.bytes());
    return Drbg(seed);
}

}  // namespace abestore
