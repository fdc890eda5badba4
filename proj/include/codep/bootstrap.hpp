#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "codep/rng.hpp"

namespace codep {

enum class BootstrapScheme { Iid, MovingBlock };

inline const char* to_string(BootstrapScheme s) {
    return s == BootstrapScheme::Iid ? "iid" : "moving_block";
}

struct BootstrapPlan {
    BootstrapScheme scheme = BootstrapScheme::MovingBlock;
    int block_length = 0;  // 0 = automatic ceil(T^{1/3})
    int replicates = 200;
    std::uint64_t seed = 0x9e3779b97f4a7c15ULL;

    int effective_block(int T) const {
        const int b = block_length > 0
                          ? block_length
                          : static_cast<int>(std::ceil(std::pow(static_cast<double>(T), 1.0 / 3.0)));
        return std::max(1, b);
    }

    void validate(int T) const {
        if (replicates < 50) throw std::invalid_argument("bootstrap: need >= 50 replicates");
        if (scheme == BootstrapScheme::MovingBlock && effective_block(T) > T / 2)
            throw std::invalid_argument("bootstrap: block length must be <= T/2");
    }
};

/// One resample of {0..T-1}: iid draws with replacement, or concatenated
/// random contiguous blocks truncated to length T.
inline std::vector<int> resample_indices(int T, const BootstrapPlan& plan, Rng& rng) {
    plan.validate(T);
    std::vector<int> idx(T);
    if (plan.scheme == BootstrapScheme::Iid) {
        for (int t = 0; t < T; ++t)
            idx[t] = static_cast<int>(rng.below(static_cast<std::uint64_t>(T)));
        return idx;
    }
    const int L = plan.effective_block(T);
    int filled = 0;
    while (filled < T) {
        const int start = static_cast<int>(rng.below(static_cast<std::uint64_t>(T - L + 1)));
        for (int k = 0; k < L && filled < T; ++k) idx[filled++] = start + k;
    }
    return idx;
}

struct BootstrapResult {
    double point = 0.0;
    double se = 0.0;
    std::vector<double> replicates;
    int failures = 0;
};

/// Bootstrap standard error of a statistic evaluated on resampled row
/// indices. The statistic receives the identity permutation for the point
/// estimate. Replicates that throw are dropped; more than 20% failures abort.
/// Deterministic: replicate k always uses the stream derived for (tag, k).
inline BootstrapResult bootstrap_se(const std::function<double(const std::vector<int>&)>& stat,
                                    int T, const BootstrapPlan& plan,
                                    const std::string& tag = "bootstrap") {
    plan.validate(T);
    BootstrapResult out;
    std::vector<int> identity(T);
    std::iota(identity.begin(), identity.end(), 0);
    out.point = stat(identity);

    const Rng master(plan.seed);
    out.replicates.reserve(plan.replicates);
    for (int b = 0; b < plan.replicates; ++b) {
        Rng stream = master.derive(tag, static_cast<std::uint64_t>(b));
        const auto idx = resample_indices(T, plan, stream);
        try {
            const double v = stat(idx);
            if (!std::isfinite(v)) throw std::runtime_error("non-finite replicate");
            out.replicates.push_back(v);
        } catch (const std::exception&) {
            ++out.failures;
        }
    }
    if (out.failures > plan.replicates / 5)
        throw std::runtime_error("bootstrap: more than 20% of replicates failed");
    const double n = static_cast<double>(out.replicates.size());
    if (n < 2) throw std::runtime_error("bootstrap: too few successful replicates");
    double m = 0.0;
    for (double v : out.replicates) m += v;
    m /= n;
    double s2 = 0.0;
    for (double v : out.replicates) s2 += (v - m) * (v - m);
    out.se = std::sqrt(s2 / (n - 1.0));
    return out;
}

}  // namespace codep
