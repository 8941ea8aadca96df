#include "envkit/rng.hpp"

#include <cmath>

#include "envkit/errors.hpp"

namespace envkit::rng {
namespace {

// Counter domains keep the split / fold_in / bit-stream output spaces from
// aliasing one another.
constexpr std::uint64_t kDomainBits = 0;
constexpr std::uint64_t kDomainSplit = 1;
constexpr std::uint64_t kDomainFold = 2;
constexpr std::uint64_t kDomainSeed = 3;

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace

std::pair<std::uint64_t, std::uint64_t> block(const Key& key, std::uint64_t c0, std::uint64_t c1) {
    // Threefry-2x64, 20 rounds. Key schedule parity constant from Skein.
    constexpr std::uint64_t kParity = 0x1BD11BDAA9FC1A22ull;
    constexpr int kRot[8] = {16, 42, 12, 31, 16, 32, 24, 21};
    const std::uint64_t ks[3] = {key.hi, key.lo, key.hi ^ key.lo ^ kParity};
    std::uint64_t x0 = c0 + ks[0];
    std::uint64_t x1 = c1 + ks[1];
    for (int r = 0; r < 20; ++r) {
        x0 += x1;
        x1 = rotl(x1, kRot[r & 7]);
        x1 ^= x0;
        if ((r & 3) == 3) {
            const std::uint64_t s = static_cast<std::uint64_t>(r / 4 + 1);
            x0 += ks[s % 3];
            x1 += ks[(s + 1) % 3] + s;
        }
    }
    return {x0, x1};
}

Key key_from_seed(std::uint64_t seed) {
    auto [hi, lo] = block(Key{0, 0}, seed, kDomainSeed);
    return Key{hi, lo};
}

std::vector<Key> split(const Key& key, std::size_t n) {
    if (n == 0) {
        throw InvalidArgumentError("split: n must be >= 1");
    }
    std::vector<Key> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto [hi, lo] = block(key, static_cast<std::uint64_t>(i), kDomainSplit);
        out[i] = Key{hi, lo};
    }
    return out;
}

Key split1(const Key& key) {
    auto [hi, lo] = block(key, 0, kDomainSplit);
    return Key{hi, lo};
}

Key fold_in(const Key& key, std::uint64_t data) {
    auto [hi, lo] = block(key, data, kDomainFold);
    return Key{hi, lo};
}

std::uint64_t bits(const Key& key, std::uint64_t index) {
    auto [x0, x1] = block(key, index >> 1, kDomainBits);
    return (index & 1) ? x1 : x0;
}

std::vector<double> uniform(const Key& key, std::size_t count, double lo, double hi) {
    if (!(lo < hi)) {
        throw InvalidArgumentError("uniform: requires lo < hi");
    }
    constexpr double kScale = 1.0 / 9007199254740992.0; // 2^-53
    std::vector<double> out(count);
    const double width = hi - lo;
    for (std::size_t i = 0; i < count; ++i) {
        const double u = static_cast<double>(bits(key, i) >> 11) * kScale;
        double v = lo + u * width;
        if (v >= hi) {
            v = std::nextafter(hi, lo);
        }
        out[i] = v;
    }
    return out;
}

double uniform01(const Key& key, std::uint64_t index) {
    constexpr double kScale = 1.0 / 9007199254740992.0;
    return static_cast<double>(bits(key, index) >> 11) * kScale;
}

double open01(const Key& key, std::uint64_t index) {
    constexpr double kScale = 1.0 / 9007199254740992.0;
    return (static_cast<double>(bits(key, index) >> 11) + 0.5) * kScale;
}

std::int64_t randint(const Key& key, std::int64_t lo, std::int64_t hi_exclusive) {
    return randint_at(key, 0, lo, hi_exclusive);
}

std::int64_t randint_at(const Key& key, std::uint64_t index, std::int64_t lo, std::int64_t hi_exclusive) {
    if (!(lo < hi_exclusive)) {
        throw InvalidArgumentError("randint: empty range");
    }
    const std::uint64_t width = static_cast<std::uint64_t>(hi_exclusive - lo);
    return lo + static_cast<std::int64_t>(bits(key, index) % width);
}

std::vector<std::int32_t> permutation(const Key& key, std::int32_t n) {
    if (n < 0) {
        throw InvalidArgumentError("permutation: n must be >= 0");
    }
    std::vector<std::int32_t> v(static_cast<std::size_t>(n));
    for (std::int32_t i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] = i;
    }
    std::uint64_t draw = 0;
    for (std::int32_t i = n - 1; i > 0; --i) {
        const std::uint64_t j = bits(key, draw++) % static_cast<std::uint64_t>(i + 1);
        std::swap(v[static_cast<std::size_t>(i)], v[j]);
    }
    return v;
}

} // namespace envkit::rng
