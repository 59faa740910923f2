#pragma once

// Tail bounds for sums of independent indicators, and an empirical check
// of them against binomial samples.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "rng.hpp"

namespace fqgp {

/// c_ε = min{-ln(e^ε (1+ε)^-(1+ε)), ε²/2}.
inline double chernoff_exponent(double eps) {
    if (!(eps > 0)) throw std::invalid_argument("chernoff_exponent: eps must be positive");
    const double a = -(eps - (1 + eps) * std::log1p(eps));
    return std::min(a, eps * eps / 2);
}

/// Upper bound on P[Y > h] for Y a sum of independent indicators with mean mu.
/// For h >= 20 mu this is 2 e^{-h/2}; otherwise 2 e^{-c_ε mu} with h = (1+ε) mu
/// (and the trivial bound 1 when h <= mu).
inline double chernoff_tail_bound(double mu, double h) {
    if (!(mu > 0)) throw std::invalid_argument("chernoff_tail_bound: mu must be positive");
    if (h >= 20 * mu) return 2 * std::exp(-h / 2);
    const double eps = h / mu - 1;
    if (eps <= 0) return 1.0;
    return std::min(1.0, 2 * std::exp(-chernoff_exponent(eps) * mu));
}

struct ChernoffCheck {
    double mu = 0, h = 0;
    std::uint64_t samples = 0, exceed = 0;
    double frequency = 0, bound = 0;
    bool ok = true;
};

/// Samples Y ~ Binomial(trials, mu/trials) and compares P[Y > h] with the bound.
/// trials defaults to max(200, 100 mu).
inline ChernoffCheck chernoff_check_point(double mu, double h, std::uint64_t samples, std::uint64_t seed, std::uint64_t trials = 0) {
    ChernoffCheck c;
    c.mu = mu;
    c.h = h;
    c.samples = samples;
    c.bound = chernoff_tail_bound(mu, h);
    if (samples == 0) return c;
    if (trials == 0) trials = std::max<std::uint64_t>(200, static_cast<std::uint64_t>(std::ceil(100 * mu)));
    if (mu > static_cast<double>(trials)) throw std::invalid_argument("chernoff check: mu exceeds the number of indicators");
    Rng rng(seed);
    std::binomial_distribution<std::uint64_t> bin(trials, mu / static_cast<double>(trials));
    for (std::uint64_t s = 0; s < samples; ++s) c.exceed += static_cast<double>(bin(rng)) > h;
    c.frequency = static_cast<double>(c.exceed) / static_cast<double>(samples);
    c.ok = c.frequency <= c.bound;
    return c;
}

/// One check per (mu, h) pair of the grids; the stream for point i is derive_seed(seed, {i}).
inline std::vector<ChernoffCheck> chernoff_empirical_check(const std::vector<double>& mus, const std::vector<double>& hs,
                                                           std::uint64_t samples, std::uint64_t seed) {
    std::vector<ChernoffCheck> out;
    if (samples == 0) return out;
    std::uint64_t i = 0;
    for (double mu : mus)
        for (double h : hs) out.push_back(chernoff_check_point(mu, h, samples, derive_seed(seed, {i++})));
    return out;
}

}  // namespace fqgp
