#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>

namespace gridatlas {

// splitmix64: tiny, portable, and identical on every platform; all randomness
// in the project flows through this so runs reproduce bit-for-bit.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() { return splitmix64(state_); }

    // n must be > 0; modulo bias is irrelevant at the scales used here.
    uint32_t next_below(uint32_t n) { return static_cast<uint32_t>(next_u64() % n); }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1p-53; }

    bool next_bool(double p) { return next_double() < p; }

private:
    uint64_t state_;
};

// Derives an independent stream seed from a base seed and up to three indices.
inline uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t s = base;
    splitmix64(s);
    s ^= a * 0x9e3779b97f4a7c15ull;
    splitmix64(s);
    s ^= b * 0xbf58476d1ce4e5b9ull;
    splitmix64(s);
    s ^= c * 0x94d049bb133111ebull;
    return splitmix64(s);
}

// FNV-1a accumulator used for content hashes and memory digests.
class Digest {
public:
    void add_byte(uint8_t b) {
        h_ ^= b;
        h_ *= 0x100000001b3ull;
    }
    void add_bytes(const void* data, size_t n) {
        const auto* p = static_cast<const uint8_t*>(data);
        for (size_t i = 0; i < n; ++i) add_byte(p[i]);
    }
    void add_u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) add_byte(static_cast<uint8_t>(v >> (8 * i)));
    }
    void add_i64(int64_t v) { add_u64(static_cast<uint64_t>(v)); }
    void add_double(double v) { add_u64(std::bit_cast<uint64_t>(v)); }
    void add_string(const std::string& s) {
        add_u64(s.size());
        add_bytes(s.data(), s.size());
    }
    uint64_t value() const { return h_; }

private:
    uint64_t h_ = 0xcbf29ce484222325ull;
};

}  // namespace gridatlas
