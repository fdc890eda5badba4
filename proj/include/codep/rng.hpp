#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace codep {

/// Deterministic 64-bit generator (xoshiro256**). Streams for independent
/// tasks are derived from a master seed with derive(), so replicate k of
/// stage "bootstrap" always sees the same draws regardless of scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        // splitmix64 expansion of the seed into the state.
        std::uint64_t z = seed;
        for (auto& si : s_) {
            z += 0x9e3779b97f4a7c15ULL;
            std::uint64_t x = z;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
            si = x ^ (x >> 31);
        }
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
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

    /// Uniform on (0,1), never exactly 0 or 1.
    double uniform() {
        double u = (next_u64() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire-style rejection-free-enough for statistical use; exact
        // uniformity via rejection on the biased region.
        std::uint64_t x, r;
        do {
            x = next_u64();
            r = x % n;
        } while (x - r > std::uint64_t(-1) - n + 1);
        return r;
    }

    /// Standard normal via polar Box-Muller (deterministic, no libm quantile).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    double exponential() { return -std::log(uniform()); }

    /// Gamma(shape, 1) via Marsaglia-Tsang, boosted for shape < 1.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Positive stable S(alpha, 1) for alpha in (0,1), Chambers-Mallows-Stuck.
    double positive_stable(double alpha) {
        const double pi = 3.14159265358979323846;
        const double u = uniform(0.0, pi);
        const double e = exponential();
        const double num = std::sin(alpha * u);
        return std::pow(num / std::pow(std::sin(u), 1.0 / alpha), 1.0 / (1.0 - alpha)) *
               std::pow(std::sin((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
    }

    /// Logarithmic-series variate with parameter p in (0,1) (Kemp's LK).
    std::uint64_t log_series(double p) {
        const double h = std::log1p(-p);
        const double v = uniform();
        if (v >= p) return 1;
        const double u = uniform();
        const double q = -std::expm1(u * h);
        if (v <= q * q) {
            const double k = 1.0 + std::log(v) / std::log(q);
            return static_cast<std::uint64_t>(k);
        }
        return v <= q ? 2 : 1;
    }

    /// Derives an independent stream for a (tag, index) pair. Depends only on
    /// the seed this generator was constructed with, not on draws made since,
    /// so derivation is order- and schedule-independent.
    Rng derive(const std::string& tag, std::uint64_t index = 0) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto mix = [&h](std::uint64_t v) {
            for (int i = 0; i < 8; ++i) {
                h ^= (v >> (8 * i)) & 0xff;
                h *= 0x100000001b3ULL;
            }
        };
        mix(seed_);
        for (char c : tag) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        mix(index);
        return Rng(h);
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace codep
