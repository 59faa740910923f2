#pragma once

// Seedable, splittable pseudo-random streams.
//
// Every randomized step derives its own stream from (master seed, key...) so
// results do not depend on evaluation order or on how work is split across
// threads.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace fqgp {

constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t x) {
    std::uint64_t s = x;
    return splitmix64(s);
}

/// Hash a master seed together with a sequence of integer keys.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = mix64(master ^ 0x6A09E667F3BCC909ull);
    for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x3C6EF372FE94F82Bull));
    return h;
}

/// xoshiro256** seeded through splitmix64. Satisfies UniformRandomBitGenerator.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        // Lemire's multiply-shift with rejection.
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
        std::uint64_t lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t thresh = (0 - bound) % bound;
            while (lo < thresh) {
                m = static_cast<unsigned __int128>((*this)()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool bernoulli(double p) { return p >= 1.0 || (p > 0.0 && uniform() < p); }

    /// Child stream keyed by `key`; the parent state is not advanced.
    Rng split(std::uint64_t key) const { return Rng(derive_seed(s_[0] ^ rotl(s_[2], 17), {key})); }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4]{};
};

/// Calls fn(i) for each index i in [0, count) kept independently with probability p.
/// Uses geometric skips, so the cost is proportional to the number kept.
template <class Fn>
void for_each_bernoulli(std::uint64_t count, double p, Rng& rng, Fn&& fn) {
    if (count == 0 || p <= 0.0) return;
    if (p >= 1.0) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    if (p > 0.25) {
        for (std::uint64_t i = 0; i < count; ++i)
            if (rng.uniform() < p) fn(i);
        return;
    }
    const double log_q = std::log1p(-p);
    std::uint64_t i = 0;
    for (;;) {
        const double u = 1.0 - rng.uniform();  // (0, 1]
        const double skip = std::floor(std::log(u) / log_q);
        if (skip >= static_cast<double>(count - i)) return;
        i += static_cast<std::uint64_t>(skip);
        fn(i);
        if (++i >= count) return;
    }
}

}  // namespace fqgp
