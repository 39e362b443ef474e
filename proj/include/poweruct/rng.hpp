#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace poweruct {

// SplitMix64 step, used only to mix raw seeds into well-spread engine seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Pure function of (base, index, stream); episode i's generators never depend
// on scheduling order, which keeps batch runs byte-reproducible under any
// worker count.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index,
                                 std::uint64_t stream = 0) {
    std::uint64_t s = base;
    std::uint64_t a = splitmix64(s);
    s ^= 0xd1342543de82ef95ull * (index + 1);
    std::uint64_t b = splitmix64(s);
    s ^= 0xaf251af3b0f025b5ull * (stream + 1);
    std::uint64_t c = splitmix64(s);
    return a ^ (b + 0x2545f4914f6cdd1dull * c);
}

// mt19937_64 engine with hand-rolled draw helpers. The std:: distributions
// are not bit-stable across standard library implementations, so results
// would not be reproducible if we used them.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased integer in [0, n).
    std::uint64_t uniform_below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_below: n must be > 0");
        if (n == 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double prob) { return uniform01() < prob; }

    // Uniform element pick. A single-element container consumes no draw.
    template <class T>
    const T& pick(const std::vector<T>& v) {
        if (v.empty()) throw std::invalid_argument("pick: empty container");
        if (v.size() == 1) return v[0];
        return v[uniform_below(v.size())];
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace poweruct
