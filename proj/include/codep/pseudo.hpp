#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "codep/garch.hpp"
#include "codep/ingest.hpp"

namespace codep {

/// Average ranks (1-based); tied values share the mean of their rank range.
inline std::vector<double> average_ranks(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double r = 0.5 * (i + j) + 1.0;  // mean of ranks i+1..j+1
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

enum class PseudoSource { ParametricPit, Ecdf };

/// T x d matrix of pseudo-observations, every entry strictly inside (0,1).
struct PseudoSample {
    Eigen::MatrixXd values;
    PseudoSource source = PseudoSource::Ecdf;

    int T() const { return static_cast<int>(values.rows()); }
    int dim() const { return static_cast<int>(values.cols()); }

    void validate() const {
        for (int t = 0; t < values.rows(); ++t)
            for (int j = 0; j < values.cols(); ++j)
                if (!(values(t, j) > 0.0 && values(t, j) < 1.0))
                    throw std::invalid_argument("pseudo-observations must lie strictly in (0,1)");
    }
};

inline constexpr double kPitClamp = 1e-10;

/// Probability integral transform through the fitted marginals:
/// u = F_eps(y_t / sigma_t), clamped away from {0,1}.
inline PseudoSample pit_pseudo_obs(const ReturnPanel& panel, const std::vector<GarchFit>& fits) {
    if (static_cast<int>(fits.size()) != panel.dim())
        throw std::invalid_argument("pit_pseudo_obs: one marginal fit per column required");
    const int T = panel.T(), d = panel.dim();
    PseudoSample out;
    out.source = PseudoSource::ParametricPit;
    out.values.resize(T, d);
    for (int j = 0; j < d; ++j) {
        const GarchFit& fit = fits[j];
        if (static_cast<int>(fit.sigma.size()) != T)
            throw std::invalid_argument("pit_pseudo_obs: fit does not match the panel length");
        InnovationSpec inn = fit.spec.innovation;
        inn.nu = fit.params.nu;
        inn.lambda = fit.params.lambda;
        const InnovationDist dist(inn);
        for (int t = 0; t < T; ++t) {
            const double u = dist.cdf(panel.returns(t, j) / fit.sigma[t]);
            out.values(t, j) = std::clamp(u, kPitClamp, 1.0 - kPitClamp);
        }
    }
    return out;
}

/// Rank-based pseudo-observations u = rank/(T+1), average ranks on ties.
inline PseudoSample ecdf_pseudo_obs(const ReturnPanel& panel) {
    const int T = panel.T(), d = panel.dim();
    if (T < 2) throw std::invalid_argument("ecdf_pseudo_obs: need T >= 2");
    PseudoSample out;
    out.source = PseudoSource::Ecdf;
    out.values.resize(T, d);
    for (int j = 0; j < d; ++j) {
        const auto ranks = average_ranks(panel.column(j));
        for (int t = 0; t < T; ++t) out.values(t, j) = ranks[t] / (T + 1.0);
    }
    return out;
}

/// Column pair (j, k) of a pseudo-sample as a T x 2 sample.
inline PseudoSample pseudo_pair(const PseudoSample& u, int j, int k) {
    PseudoSample out;
    out.source = u.source;
    out.values.resize(u.T(), 2);
    out.values.col(0) = u.values.col(j);
    out.values.col(1) = u.values.col(k);
    return out;
}

}  // namespace codep
