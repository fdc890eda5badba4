#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <stdexcept>

#include "codep/copula_archimedean.hpp"
#include "codep/copula_elliptical.hpp"
#include "codep/copula_params.hpp"

namespace codep {

/// Reusable density evaluator: factorizations, margin caches and generator
/// polynomials are built once, then log_density is cheap per point.
///
/// For grid work the evaluator also exposes the margin "score" transform
/// (normal or t quantile for elliptical families, identity for Archimedean)
/// together with a density on scores, so tensor grids can transform each axis
/// once instead of once per grid cell.
class CopulaDensityEval {
public:
    CopulaDensityEval(CopulaFamily family, const CopulaParams& params, int d,
                      int skewt_margin_cells = 200)
        : family_(family), d_(d), params_(params) {
        params.validate(family, d);
        switch (family_) {
            case CopulaFamily::Gaussian:
                gauss_ = std::make_unique<GaussianCopulaDensity>(params.corr);
                break;
            case CopulaFamily::StudentT:
                tcop_ = std::make_unique<StudentTCopulaDensity>(params.corr, params.nu);
                break;
            case CopulaFamily::SkewT:
                skewt_ = std::make_unique<SkewTCopula>(params.corr, params.delta, params.nu,
                                                       skewt_margin_cells);
                break;
            default:
                break;
        }
    }

    int dim() const { return d_; }
    CopulaFamily family() const { return family_; }
    const CopulaParams& params() const { return params_; }

    /// Margin score of u for coordinate j.
    double score(int j, double u) const {
        switch (family_) {
            case CopulaFamily::Gaussian: return norm_quantile(u);
            case CopulaFamily::StudentT: return t_quantile(u, params_.nu);
            case CopulaFamily::SkewT: return skewt_->margin(j).quantile(u);
            default: return u;
        }
    }

    double log_density_scores(const Eigen::VectorXd& z) const {
        switch (family_) {
            case CopulaFamily::Gaussian: return gauss_->log_density_z(z);
            case CopulaFamily::StudentT: return tcop_->log_density_z(z);
            case CopulaFamily::SkewT: {
                double ll = skewt_->joint_log_pdf(z);
                for (int j = 0; j < d_; ++j) ll -= skewt_->margin(j).log_pdf(z[j]);
                return ll;
            }
            case CopulaFamily::Clayton: return clayton_log_density(z, params_.theta);
            case CopulaFamily::Gumbel: return gumbel_log_density(z, params_.theta);
            case CopulaFamily::Frank: return frank_log_density(z, params_.theta);
        }
        throw std::logic_error("unreachable");
    }

    double log_density(const Eigen::VectorXd& u) const {
        if (is_elliptical(family_)) {
            Eigen::VectorXd z(d_);
            for (int j = 0; j < d_; ++j) z[j] = score(j, u[j]);
            return log_density_scores(z);
        }
        return log_density_scores(u);
    }

    /// Sum of log densities over the rows of U.
    double total_log_density(const Eigen::MatrixXd& U) const {
        double s = 0.0;
        Eigen::VectorXd row(d_);
        for (int t = 0; t < U.rows(); ++t) {
            row = U.row(t).transpose();
            s += log_density(row);
        }
        return s;
    }

    const SkewTCopula* skewt() const { return skewt_.get(); }

private:
    CopulaFamily family_;
    int d_;
    CopulaParams params_;
    std::unique_ptr<GaussianCopulaDensity> gauss_;
    std::unique_ptr<StudentTCopulaDensity> tcop_;
    std::unique_ptr<SkewTCopula> skewt_;
};

/// log c(u) for a point strictly inside (0,1)^d.
inline double copula_log_density(CopulaFamily family, const CopulaParams& params,
                                 const Eigen::VectorXd& u) {
    for (int j = 0; j < u.size(); ++j)
        if (!(u[j] > 0.0 && u[j] < 1.0))
            throw std::invalid_argument("copula_log_density: u must be strictly inside (0,1)^d");
    const CopulaDensityEval eval(family, params, static_cast<int>(u.size()));
    return eval.log_density(u);
}

/// Bivariate C(u,v). Elliptical families integrate numerically (conditional
/// single integral for gaussian/t, orthant quadrature for skew-t);
/// Archimedean CDFs are closed-form.
inline double copula_cdf(CopulaFamily family, const CopulaParams& params, double u, double v) {
    if (u <= 0.0 || v <= 0.0) return 0.0;
    if (u > 1.0 || v > 1.0) throw std::invalid_argument("copula_cdf: u,v must be in [0,1]");
    switch (family) {
        case CopulaFamily::Gaussian:
            params.validate(family, 2);
            return gaussian_copula_cdf2(u, v, params.rho());
        case CopulaFamily::StudentT:
            params.validate(family, 2);
            return t_copula_cdf2(u, v, params.rho(), params.nu);
        case CopulaFamily::SkewT: {
            params.validate(family, 2);
            const SkewTCopula cop(params.corr, params.delta, params.nu);
            return cop.cdf2(u, v);
        }
        case CopulaFamily::Clayton: {
            params.validate(family, 2);
            Eigen::VectorXd w(2);
            w << std::min(u, 1.0), std::min(v, 1.0);
            return clayton_cdf(w, params.theta);
        }
        case CopulaFamily::Gumbel: {
            params.validate(family, 2);
            Eigen::VectorXd w(2);
            w << std::min(u, 1.0), std::min(v, 1.0);
            return gumbel_cdf(w, params.theta);
        }
        case CopulaFamily::Frank: {
            params.validate(family, 2);
            Eigen::VectorXd w(2);
            w << std::min(u, 1.0), std::min(v, 1.0);
            return frank_cdf(w, params.theta);
        }
    }
    throw std::logic_error("unreachable");
}

/// n x d sample, deterministic given the rng state.
inline Eigen::MatrixXd sample_copula(CopulaFamily family, const CopulaParams& params, int d,
                                     int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_copula: n must be >= 1");
    params.validate(family, d);
    Eigen::MatrixXd out;
    switch (family) {
        case CopulaFamily::Gaussian:
            sample_gaussian_copula(params.corr, n, rng, out);
            break;
        case CopulaFamily::StudentT:
            sample_t_copula(params.corr, params.nu, n, rng, out);
            break;
        case CopulaFamily::SkewT: {
            const SkewTCopula cop(params.corr, params.delta, params.nu);
            cop.sample(n, rng, out);
            break;
        }
        case CopulaFamily::Clayton:
            sample_clayton(params.theta, d, n, rng, out);
            break;
        case CopulaFamily::Gumbel:
            sample_gumbel(params.theta, d, n, rng, out);
            break;
        case CopulaFamily::Frank:
            sample_frank(params.theta, d, n, rng, out);
            break;
    }
    // Clamp to the open cube; downstream log-densities assume interior points.
    for (int t = 0; t < out.rows(); ++t)
        for (int j = 0; j < d; ++j) out(t, j) = std::clamp(out(t, j), 1e-12, 1.0 - 1e-12);
    return out;
}

}  // namespace codep
