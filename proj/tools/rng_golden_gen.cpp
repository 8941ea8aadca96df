// Emits the RNG conformance table consumed by the golden-vector test.
// Regenerate only when the keyed construction itself changes, never to make
// a failing build pass: tests/data/rng_golden.txt is the committed contract.
#include <cinttypes>
#include <cstdio>

#include "envkit/rng.hpp"

using envkit::rng::Key;

int main() {
    const Key keys[3] = {
        Key{0, 0},
        Key{0x243f6a8885a308d3ull, 0x13198a2e03707344ull},
        envkit::rng::key_from_seed(42),
    };
    for (const Key& k : keys) {
        for (std::uint64_t ctr : {0ull, 1ull, 0xffffffffffffffffull}) {
            const auto [x0, x1] = envkit::rng::block(k, ctr, 0);
            std::printf("%016" PRIx64 " %016" PRIx64 " block %" PRIu64 " 0 %016" PRIx64
                        " %016" PRIx64 "\n",
                        k.hi, k.lo, ctr, x0, x1);
        }
        const auto children = envkit::rng::split(k, 3);
        for (std::size_t i = 0; i < children.size(); ++i) {
            std::printf("%016" PRIx64 " %016" PRIx64 " split %zu %016" PRIx64 " %016" PRIx64 "\n",
                        k.hi, k.lo, i, children[i].hi, children[i].lo);
        }
        const Key folded = envkit::rng::fold_in(k, 7);
        std::printf("%016" PRIx64 " %016" PRIx64 " fold_in 7 %016" PRIx64 " %016" PRIx64 "\n", k.hi,
                    k.lo, folded.hi, folded.lo);
        std::printf("%016" PRIx64 " %016" PRIx64 " uniform01 0 %.17g\n", k.hi, k.lo,
                    envkit::rng::uniform01(k, 0));
        std::printf("%016" PRIx64 " %016" PRIx64 " randint 0 1000000 %lld\n", k.hi, k.lo,
                    static_cast<long long>(envkit::rng::randint(k, 0, 1000000)));
        const auto perm = envkit::rng::permutation(k, 8);
        std::printf("%016" PRIx64 " %016" PRIx64 " permutation 8", k.hi, k.lo);
        for (auto v : perm) {
            std::printf(" %d", v);
        }
        std::printf("\n");
    }
    return 0;
}
