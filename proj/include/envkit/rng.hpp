#pragma once
#include <cstdint>
#include <utility>
#include <vector>

namespace envkit::rng {

// Splittable, counter-based pseudorandom key. All randomness in the library
// derives from pure functions of (key, counter, domain), so reset/step stay
// functionally pure and reproduce bit-identically on every platform.
//
// The block function is a Threefry-2x64 style 20-round keyed mixer. Not
// cryptographic; chosen for exact determinism independent of call order and
// thread count.
struct Key {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    friend bool operator==(const Key&, const Key&) = default;
    friend bool operator<(const Key& a, const Key& b) {
        return a.hi != b.hi ? a.hi < b.hi : a.lo < b.lo;
    }
};

// 20-round Threefry-2x64 style block: maps a 128-bit counter to 128 bits of
// output under a 128-bit key. Bijective in (c0, c1) for a fixed key.
std::pair<std::uint64_t, std::uint64_t> block(const Key& key, std::uint64_t c0, std::uint64_t c1);

// Deterministic key from a user-facing integer seed.
Key key_from_seed(std::uint64_t seed);

// n fresh keys, pairwise distinct and distinct from the parent (bijectivity
// of the block function guarantees pairwise distinctness). n >= 1.
std::vector<Key> split(const Key& key, std::size_t n);

// Single-child convenience split.
Key split1(const Key& key);

// Mix an integer into a key. Injective in `data` for a fixed key.
Key fold_in(const Key& key, std::uint64_t data);

// i-th 64-bit word of the key's output stream.
std::uint64_t bits(const Key& key, std::uint64_t index);

// `count` doubles in [lo, hi), each built from the 53 high bits of one
// 64-bit word. lo < hi.
std::vector<double> uniform(const Key& key, std::size_t count, double lo, double hi);

// One double in [0, 1) from the index-th stream word.
double uniform01(const Key& key, std::uint64_t index = 0);

// One double in the open interval (0, 1).
double open01(const Key& key, std::uint64_t index = 0);

// Integer in [lo, hi_exclusive). Modulo of one 64-bit draw; bias is
// below 2^-32 for ranges under 2^32.
std::int64_t randint(const Key& key, std::int64_t lo, std::int64_t hi_exclusive);

// Same draw but addressable by stream index, for loops that need several
// independent integers under one key.
std::int64_t randint_at(const Key& key, std::uint64_t index, std::int64_t lo, std::int64_t hi_exclusive);

// Fisher-Yates permutation of 0..n-1.
std::vector<std::int32_t> permutation(const Key& key, std::int32_t n);

} // namespace envkit::rng
