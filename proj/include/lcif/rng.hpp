#pragma once

// Deterministic random source. std::mt19937_64 itself is specified bit-exactly,
// but the standard distributions are not portable across library implementations,
// and generated artifacts must be byte-identical for a given seed on any
// toolchain. So all bounded draws and shuffles go through this wrapper.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace lcif {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform draw in [0, n). Fixed-point multiply with rejection so results
    // are unbiased and identical everywhere.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            std::uint64_t r = engine_();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform in [lo, hi] inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    double unit() {  // [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool chance(double p) { return unit() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(below(v.size()))];
    }

    // Child generator for an independent deterministic stream.
    Rng fork(std::uint64_t salt) const {
        std::uint64_t mixed = mix(state_seed_proxy() ^ salt);
        return Rng(mixed);
    }

    static std::uint64_t mix(std::uint64_t x) {  // splitmix64 finalizer
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    // fork() must not disturb this stream, so derive the child from a copy.
    std::uint64_t state_seed_proxy() const {
        std::mt19937_64 copy = engine_;
        return copy();
    }

    std::mt19937_64 engine_;
};

// Stable 64-bit stream seed from a base seed and a label path, so each
// component (pool, task, interval, item) gets an independent reproducible
// stream regardless of evaluation order elsewhere.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ Rng::mix(base);
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return Rng::mix(h);
}

}  // namespace lcif
