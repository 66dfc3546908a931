#pragma once

// Seedable random kernels used by the optimizer and the benchmark harness.
//
// Every sampler here is written against raw 64-bit engine output rather than
// the <random> distribution classes, whose algorithms are unspecified by the
// standard. The engine itself is std::mt19937_64, whose output sequence is
// fully specified, so a seed replays byte-identically on any conforming
// implementation.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

namespace dsn::stochastic {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed of the `index`-th child stream of `seed`: the (index+1)-th output of a
/// SplitMix64 generator started at `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

/// Anything that can feed the samplers. The optimizer is generic over this so
/// tests can substitute a scripted source with known draws.
template <class S>
concept random_source = requires(S& s, std::uint64_t n) {
    { s.uniform() } -> std::convertible_to<double>;
    { s.gaussian() } -> std::convertible_to<double>;
    { s.cauchy() } -> std::convertible_to<double>;
    { s.index(n) } -> std::convertible_to<std::uint64_t>;
};

/// A single-owner stream of random draws. Not safe for concurrent use; give
/// each worker its own stream via derive_seed().
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t bits() { return engine_(); }

    /// Uniform on (0, 1]; never exactly zero.
    double uniform() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double open_uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; consumes exactly two engine words.
    double gaussian() {
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        return radius * std::cos(angle);
    }

    /// Standard Cauchy via tan(pi (u - 1/2)).
    double cauchy() { return std::tan(std::numbers::pi * (open_uniform() - 0.5)); }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t index(std::uint64_t n) {
        if (n == 0) throw std::domain_error("index: empty range");
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) return r % n;
        }
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

static_assert(random_source<RandomStream>);

template <random_source S>
double sample_uniform(S& stream) {
    return stream.uniform();
}

template <random_source S>
double sample_gaussian(S& stream) {
    return stream.gaussian();
}

template <random_source S>
double sample_cauchy(S& stream) {
    return stream.cauchy();
}

namespace detail {

inline void check_poisson_mean(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean))
        throw std::domain_error("poisson: mean must be finite and non-negative, got " +
                                std::to_string(mean));
}

// Walks the pmf in log space: log p(k) = log p(k-1) + log(mean) - log(k).
class PoissonPmf {
public:
    explicit PoissonPmf(double mean) : log_mean_(std::log(mean)), log_p_(-mean) {}
    double value() const { return std::exp(log_p_); }
    void advance(std::uint64_t next_k) { log_p_ += log_mean_ - std::log(static_cast<double>(next_k)); }

private:
    double log_mean_;
    double log_p_;
};

}  // namespace detail

/// Poisson(mean) by inverse-CDF accumulation over the pmf.
template <random_source S>
std::uint64_t sample_poisson(S& stream, double mean) {
    detail::check_poisson_mean(mean);
    if (mean == 0.0) return 0;
    const double u = stream.uniform();
    detail::PoissonPmf pmf(mean);
    double cdf = 0.0;
    for (std::uint64_t k = 0;; ++k) {
        if (k > 0) pmf.advance(k);
        const double p = pmf.value();
        cdf += p;
        if (u <= cdf) return k;
        // cdf can saturate just below u when u is within an ulp of 1
        if (static_cast<double>(k) > mean && p <= cdf * 1e-17) return k;
    }
}

/// Poisson(mean) restricted to k = 0..max_k with the pmf renormalised over
/// that support. One uniform draw.
template <random_source S>
std::uint64_t sample_truncated_poisson(S& stream, double mean, std::uint64_t max_k) {
    detail::check_poisson_mean(mean);
    if (mean == 0.0) return 0;
    const double u = stream.uniform();

    double total = 0.0;
    {
        detail::PoissonPmf pmf(mean);
        for (std::uint64_t k = 0; k <= max_k; ++k) {
            if (k > 0) pmf.advance(k);
            total += pmf.value();
        }
    }
    const double target = u * total;
    detail::PoissonPmf pmf(mean);
    double cdf = 0.0;
    for (std::uint64_t k = 0; k <= max_k; ++k) {
        if (k > 0) pmf.advance(k);
        cdf += pmf.value();
        if (target <= cdf) return k;
    }
    return max_k;
}

/// Roulette-wheel selection: index i with probability weights[i] / sum.
template <random_source S>
std::size_t roulette(S& stream, std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::domain_error("roulette: weights must be finite and non-negative");
        total += w;
    }
    if (!(total > 0.0)) throw std::domain_error("roulette: all weights are zero");

    const double target = stream.uniform() * total;
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] == 0.0) continue;
        cumulative += weights[i];
        last_positive = i;
        if (target <= cumulative) return i;
    }
    return last_positive;
}

}  // namespace dsn::stochastic
