#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace dfgfp {

// Deterministic RNG used by every stochastic stage. The engine is
// std::mt19937_64 (bit-exact across platforms); the int/double draws below
// avoid std::uniform_*_distribution, whose output is implementation defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // Unbiased draw from [0, n). n must be nonzero.
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t limit = n * (std::uint64_t(-1) / n);
        std::uint64_t r;
        do {
            r = eng_();
        } while (r >= limit);
        return r % n;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return double(eng_() >> 11) * 0x1.0p-53; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[bounded(i)]);
        }
    }

private:
    std::mt19937_64 eng_;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}
}  // namespace detail

// Named substream derivation: the master seed plus a stream tag plus an index
// yield an independent engine seed. Used so that walk, fragment and synthesis
// randomness never share state and parallel evaluation stays reproducible.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                                 std::uint64_t index = 0) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : stream) {
        h = (h ^ std::uint8_t(c)) * 0x100000001b3ull;
    }
    h = detail::splitmix64(h ^ master);
    h = detail::splitmix64(h ^ index);
    return h;
}

}  // namespace dfgfp
