#pragma once

#include <memory>
#include <span>
#include <string_view>

#include "abestore/bytes.hpp"

namespace abestore {

// All randomness in the project flows through this interface so that the
// harness can replace it with a seeded deterministic source.
class RandomSource {
public:
    virtual ~RandomSource() = default;

    virtual void fill(std::span<uint8_t> out) = 0;

    Bytes bytes(size_t n) {
        Bytes b(n);
        fill(b);
        return b;
    }
    uint64_t u64() {
        uint8_t b[8];
        fill(b);
        uint64_t v = 0;
        for (uint8_t x : b) v = (v << 8) | x;
        return v;
    }
    // Uniform in [0, bound). bound > 0.
    uint64_t below(uint64_t bound);
};

// OS randomness (/dev/urandom).
class SystemRandom final : public RandomSource {
public:
    void fill(std::span<uint8_t> out) override;
};

// SHA-256 counter DRBG.  Not an approved construction; used for
// reproducible tests and harness transcripts, and as a CSPRNG stand-in
// when seeded from the OS.
class Drbg final : public RandomSource {
public:
    explicit Drbg(std::span<const uint8_t> seed);
    explicit Drbg(uint64_t seed);

    void fill(std::span<uint8_t> out) override;

    // Independent child stream; children with distinct labels never
    // overlap regardless of draw order on the parent.
    Drbg fork(std::string_view label) const;

private:
    Bytes state_;
    uint64_t counter_ = 0;
};

}  // namespace abestore
