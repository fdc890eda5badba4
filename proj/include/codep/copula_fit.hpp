#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "codep/copula.hpp"
#include "codep/optimize.hpp"
#include "codep/pseudo.hpp"

namespace codep {

struct CopulaFit;

struct CopulaFitOptions {
    int skewt_margin_cells = 200;  // margin grid used while optimizing
    int nm_evals_per_param = 120;
    int nm_evals_cap = 600;
    bool compute_se = true;
    double nu_lo = 2.0;    // fitted nu stays in (nu_lo, nu_hi); estimates near
    double nu_hi = 100.0;  // either end are flagged as boundary solutions
    /// Optional previous fit of the same family/dimension; narrows the search
    /// (bootstrap replicates re-fit near the original optimum many times).
    const CopulaFit* warm_start = nullptr;
};

struct CopulaFit {
    CopulaFamily family = CopulaFamily::Gaussian;
    int dim = 2;
    int T = 0;
    CopulaParams params;
    double loglik = 0.0;
    double bic = 0.0;  // raw convention: k ln T - 2 loglik
    std::vector<std::string> param_names;
    std::vector<double> param_values;
    std::vector<double> std_errors;
    bool se_ok = false;
    bool converged = false;
    bool boundary_hit = false;
    PseudoSource source = PseudoSource::Ecdf;

    int n_params() const { return static_cast<int>(param_names.size()); }
};

namespace fit_detail {

/// Pseudo-log-likelihood for elliptical families on precomputed scores Z.
/// The per-margin terms do not depend on R, so they are folded into a single
/// constant and each R evaluation costs one triangular solve per row.
class EllipticalPll {
public:
    EllipticalPll(const Eigen::MatrixXd& Z, double nu, bool is_t) : Z_(Z), nu_(nu), is_t_(is_t) {
        const int T = static_cast<int>(Z.rows()), d = static_cast<int>(Z.cols());
        margin_sum_ = 0.0;
        if (is_t_) {
            const double mc = log_gamma(0.5 * (nu_ + 1.0)) - log_gamma(0.5 * nu_) -
                              0.5 * std::log(nu_ * pi_v);
            for (int t = 0; t < T; ++t)
                for (int j = 0; j < d; ++j)
                    margin_sum_ += mc - 0.5 * (nu_ + 1.0) * std::log1p(Z(t, j) * Z(t, j) / nu_);
        } else {
            margin_sum_ = -0.5 * Z.squaredNorm() - 0.5 * T * d * std::log(2.0 * pi_v);
        }
    }

    double eval(const Eigen::MatrixXd& R) const {
        const int T = static_cast<int>(Z_.rows()), d = static_cast<int>(Z_.cols());
        Eigen::LLT<Eigen::MatrixXd> llt(R);
        if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
        const Eigen::MatrixXd L = llt.matrixL();
        double log_det = 0.0;
        for (int i = 0; i < d; ++i) log_det += 2.0 * std::log(L(i, i));
        const Eigen::MatrixXd W = L.triangularView<Eigen::Lower>().solve(Z_.transpose());
        double ll = -0.5 * T * log_det;
        if (is_t_) {
            const double jc = log_gamma(0.5 * (nu_ + d)) - log_gamma(0.5 * nu_) -
                              0.5 * d * std::log(nu_ * pi_v);
            for (int t = 0; t < T; ++t)
                ll += jc - 0.5 * (nu_ + d) * std::log1p(W.col(t).squaredNorm() / nu_);
            ll -= margin_sum_;
        } else {
            for (int t = 0; t < T; ++t) ll += -0.5 * W.col(t).squaredNorm();
            ll += -0.5 * T * d * std::log(2.0 * pi_v);  // joint normal constant
            ll -= margin_sum_;
        }
        return ll;
    }

private:
    const Eigen::MatrixXd& Z_;
    double nu_;
    bool is_t_;
    double margin_sum_ = 0.0;
};

/// Maximizes the elliptical pseudo-likelihood over R for fixed scores.
/// Bivariate: Brent on atanh(rho); higher d: Nelder-Mead on the correlation
/// chart warm-started from `warm` (or the sample correlation of Z).
inline std::pair<Eigen::MatrixXd, double> optimize_R(const EllipticalPll& pll,
                                                     const Eigen::MatrixXd& Z,
                                                     const Eigen::MatrixXd* warm, int nm_evals) {
    const int d = static_cast<int>(Z.cols());
    if (d == 2) {
        auto neg = [&](double x) {
            Eigen::MatrixXd R(2, 2);
            const double r = std::tanh(x);
            R << 1.0, r, r, 1.0;
            return -pll.eval(R);
        };
        auto res = grid_then_brent(neg, -4.0, 4.0, 17, 1e-10);
        Eigen::MatrixXd R(2, 2);
        const double r = std::tanh(res.x[0]);
        R << 1.0, r, r, 1.0;
        return {R, -res.fmin};
    }
    const CorrelationChart chart{d};
    Eigen::MatrixXd R0;
    if (warm) {
        R0 = *warm;
    } else {
        Eigen::MatrixXd C = (Z.transpose() * Z) / Z.rows();
        Eigen::VectorXd s = C.diagonal().cwiseSqrt();
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) C(i, j) /= s[i] * s[j];
        R0 = nearest_pd_correlation(C);
    }
    auto neg = [&](const Eigen::VectorXd& x) { return -pll.eval(chart.to_matrix(x)); };
    OptimResult nm = nelder_mead(neg, chart.from_matrix(R0), 0.08, 1e-11, nm_evals);
    nm = bfgs_polish(neg, nm.x, 40);
    return {chart.to_matrix(nm.x), -nm.fmin};
}

inline Eigen::MatrixXd scores_gaussian(const Eigen::MatrixXd& U) {
    Eigen::MatrixXd Z(U.rows(), U.cols());
    for (int t = 0; t < U.rows(); ++t)
        for (int j = 0; j < U.cols(); ++j) Z(t, j) = norm_quantile(U(t, j));
    return Z;
}

inline Eigen::MatrixXd scores_t(const Eigen::MatrixXd& U, double nu) {
    Eigen::MatrixXd Z(U.rows(), U.cols());
    for (int t = 0; t < U.rows(); ++t)
        for (int j = 0; j < U.cols(); ++j) Z(t, j) = t_quantile(U(t, j), nu);
    return Z;
}

inline std::vector<std::string> corr_param_names(int d) {
    if (d == 2) return {"rho"};
    std::vector<std::string> names;
    for (int i = 1; i < d; ++i)
        for (int j = 0; j < i; ++j)
            names.push_back("rho_" + std::to_string(i + 1) + std::to_string(j + 1));
    return names;
}

inline std::vector<double> corr_param_values(const Eigen::MatrixXd& R) {
    std::vector<double> v;
    for (int i = 1; i < R.rows(); ++i)
        for (int j = 0; j < i; ++j) v.push_back(R(i, j));
    return v;
}

/// Full unconstrained chart for one family: correlation block + bounded
/// log-map for nu + free deltas, or the theta map for Archimedean families.
struct CopulaChart {
    CopulaFamily family;
    int d;
    double nu_lo = 2.0, nu_hi = 100.0;

    int dim() const {
        switch (family) {
            case CopulaFamily::Gaussian: return d * (d - 1) / 2;
            case CopulaFamily::StudentT: return d * (d - 1) / 2 + 1;
            case CopulaFamily::SkewT: return d * (d - 1) / 2 + 1 + d;
            default: return 1;
        }
    }

    double nu_of(double x) const {
        const double s = 1.0 / (1.0 + std::exp(-x));
        return nu_lo + (nu_hi - nu_lo) * s;
    }
    double x_of_nu(double nu) const {
        const double s = std::clamp((nu - nu_lo) / (nu_hi - nu_lo), 1e-9, 1.0 - 1e-9);
        return std::log(s / (1.0 - s));
    }

    double theta_of(double x) const {
        switch (family) {
            case CopulaFamily::Clayton:
                return d == 2 ? std::expm1(std::min(x, 8.0)) : std::exp(std::min(x, 8.0));
            case CopulaFamily::Gumbel: return 1.0 + std::exp(std::min(x, 8.0));
            case CopulaFamily::Frank: return d == 2 ? x : std::exp(std::min(x, 6.0));
            default: throw std::logic_error("theta_of: not Archimedean");
        }
    }
    double x_of_theta(double th) const {
        switch (family) {
            case CopulaFamily::Clayton:
                return d == 2 ? std::log1p(th) : std::log(th);
            case CopulaFamily::Gumbel: return std::log(th - 1.0);
            case CopulaFamily::Frank: return d == 2 ? th : std::log(th);
            default: throw std::logic_error("x_of_theta: not Archimedean");
        }
    }

    CopulaParams to_params(const Eigen::VectorXd& x) const {
        CopulaParams p;
        if (is_elliptical(family)) {
            const CorrelationChart cc{d};
            p.corr = cc.to_matrix(x.head(cc.n_free()));
            int k = cc.n_free();
            if (family != CopulaFamily::Gaussian) p.nu = nu_of(x[k++]);
            if (family == CopulaFamily::SkewT) p.delta = x.segment(k, d);
            else p.delta = Eigen::VectorXd::Zero(d);
        } else {
            p.theta = theta_of(x[0]);
        }
        return p;
    }

    Eigen::VectorXd from_params(const CopulaParams& p) const {
        Eigen::VectorXd x(dim());
        if (is_elliptical(family)) {
            const CorrelationChart cc{d};
            x.head(cc.n_free()) = cc.from_matrix(p.corr);
            int k = cc.n_free();
            if (family != CopulaFamily::Gaussian) x[k++] = x_of_nu(p.nu);
            if (family == CopulaFamily::SkewT) x.segment(k, d) = p.delta;
        } else {
            x[0] = x_of_theta(p.theta);
        }
        return x;
    }
};

inline std::vector<std::string> copula_param_names(CopulaFamily family, int d) {
    std::vector<std::string> names;
    if (is_elliptical(family)) {
        names = corr_param_names(d);
        if (family != CopulaFamily::Gaussian) names.push_back("nu");
        if (family == CopulaFamily::SkewT)
            for (int j = 1; j <= d; ++j) names.push_back("delta_" + std::to_string(j));
    } else {
        names.push_back("theta");
    }
    return names;
}

inline std::vector<double> copula_param_values(CopulaFamily family, const CopulaParams& p,
                                               int d) {
    std::vector<double> v;
    if (is_elliptical(family)) {
        v = corr_param_values(p.corr);
        if (family != CopulaFamily::Gaussian) v.push_back(p.nu);
        if (family == CopulaFamily::SkewT)
            for (int j = 0; j < d; ++j) v.push_back(p.delta[j]);
    } else {
        v.push_back(p.theta);
    }
    return v;
}

}  // namespace fit_detail

/// Standard errors from the inverse numerical Hessian of the negative
/// pseudo-log-likelihood on the fitting chart, delta-mapped to the natural
/// parameters. Fills fit.std_errors in place; leaves NaNs when the Hessian
/// is unusable.
inline void copula_fit_standard_errors(CopulaFit& fit, const PseudoSample& u,
                                       const CopulaFitOptions& opts = {}) {
    const fit_detail::CopulaChart chart{fit.family, fit.dim, opts.nu_lo, opts.nu_hi};
    const Eigen::VectorXd x0 = chart.from_params(fit.params);
    const int n = static_cast<int>(x0.size());
    const int k = fit.n_params();
    fit.std_errors.assign(k, std::numeric_limits<double>::quiet_NaN());
    fit.se_ok = false;

    auto neg = [&](const Eigen::VectorXd& x) -> double {
        try {
            const CopulaParams p = chart.to_params(x);
            p.validate(fit.family, fit.dim);
            const CopulaDensityEval ev(fit.family, p, fit.dim, opts.skewt_margin_cells);
            const double ll = ev.total_log_density(u.values);
            return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const Eigen::MatrixXd H = numerical_hessian(neg, x0, Eigen::VectorXd::Constant(n, 1e-4));
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success) return;
    const Eigen::MatrixXd cov_x = llt.solve(Eigen::MatrixXd::Identity(n, n));

    Eigen::MatrixXd J(k, n);
    const std::vector<double> th0 =
        fit_detail::copula_param_values(fit.family, chart.to_params(x0), fit.dim);
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXd xp = x0;
        const double h = 1e-6 * std::max(1.0, std::abs(x0[j]));
        xp[j] += h;
        const std::vector<double> thp =
            fit_detail::copula_param_values(fit.family, chart.to_params(xp), fit.dim);
        for (int i = 0; i < k; ++i) J(i, j) = (thp[i] - th0[i]) / h;
    }
    const Eigen::MatrixXd cov = J * cov_x * J.transpose();
    bool ok = true;
    for (int i = 0; i < k; ++i)
        if (!(cov(i, i) >= 0.0) || !std::isfinite(cov(i, i))) ok = false;
    if (!ok) return;
    for (int i = 0; i < k; ++i) fit.std_errors[i] = std::sqrt(cov(i, i));
    fit.se_ok = true;
}

/// Maximum pseudo-likelihood fit of one copula family.
///
/// Elliptical families profile the correlation block inside a 1-D search
/// over nu (scores are recomputed only when nu moves); the skew-t starts
/// from the symmetric-t solution; Archimedean fits are a guarded 1-D search
/// on a log-type chart for theta.
inline CopulaFit fit_copula(CopulaFamily family, const PseudoSample& u,
                            const CopulaFitOptions& opts = {}) {
    const int T = u.T(), d = u.dim();
    if (T < 50) throw std::invalid_argument("fit_copula: need T >= 50");
    u.validate();
    const Eigen::MatrixXd& U = u.values;

    CopulaFit fit;
    fit.family = family;
    fit.dim = d;
    fit.T = T;
    fit.source = u.source;
    fit.converged = true;

    const fit_detail::CopulaChart chart{family, d, opts.nu_lo, opts.nu_hi};

    switch (family) {
        case CopulaFamily::Gaussian: {
            const Eigen::MatrixXd Z = fit_detail::scores_gaussian(U);
            const fit_detail::EllipticalPll pll(Z, 0.0, false);
            auto [R, ll] = fit_detail::optimize_R(pll, Z, nullptr,
                                                  opts.nm_evals_per_param * chart.dim());
            fit.params.corr = R;
            fit.params.delta = Eigen::VectorXd::Zero(d);
            fit.loglik = ll;
            break;
        }
        case CopulaFamily::StudentT: {
            Eigen::MatrixXd warmR;
            bool have_warm = false;
            if (opts.warm_start && opts.warm_start->family == family &&
                opts.warm_start->dim == d) {
                warmR = opts.warm_start->params.corr;
                have_warm = true;
            }
            auto profile = [&](double x_nu) -> double {
                const double nu = chart.nu_of(x_nu);
                const Eigen::MatrixXd Z = fit_detail::scores_t(U, nu);
                const fit_detail::EllipticalPll pll(Z, nu, true);
                auto [R, ll] = fit_detail::optimize_R(
                    pll, Z, have_warm ? &warmR : nullptr,
                    std::max(200, opts.nm_evals_per_param * d * (d - 1) / 2));
                warmR = R;
                have_warm = true;
                return -ll;
            };
            double x_lo = chart.x_of_nu(2.2), x_hi = chart.x_of_nu(99.0);
            int grid_n = 13;
            if (opts.warm_start && opts.warm_start->family == family) {
                const double xw = chart.x_of_nu(opts.warm_start->params.nu);
                x_lo = std::max(x_lo, xw - 1.0);
                x_hi = std::min(x_hi, xw + 1.0);
                grid_n = 5;
            }
            auto res = grid_then_brent(profile, x_lo, x_hi, grid_n, 1e-4);
            const double nu = chart.nu_of(res.x[0]);
            const Eigen::MatrixXd Z = fit_detail::scores_t(U, nu);
            const fit_detail::EllipticalPll pll(Z, nu, true);
            auto [R, ll] =
                fit_detail::optimize_R(pll, Z, have_warm ? &warmR : nullptr,
                                       std::max(300, opts.nm_evals_per_param * chart.dim()));
            fit.params.corr = R;
            fit.params.nu = nu;
            fit.params.delta = Eigen::VectorXd::Zero(d);
            fit.loglik = ll;
            fit.boundary_hit = nu < opts.nu_lo + 0.3 || nu > opts.nu_hi * 0.95;
            break;
        }
        case CopulaFamily::SkewT: {
            CopulaFitOptions sub = opts;
            sub.compute_se = false;
            sub.warm_start = nullptr;
            CopulaParams p0;
            double symmetric_ll = -std::numeric_limits<double>::infinity();
            if (opts.warm_start && opts.warm_start->family == family &&
                opts.warm_start->dim == d) {
                p0 = opts.warm_start->params;
            } else {
                const CopulaFit tfit = fit_copula(CopulaFamily::StudentT, u, sub);
                p0 = tfit.params;
                p0.delta = Eigen::VectorXd::Zero(d);
                symmetric_ll = tfit.loglik;
            }
            auto neg = [&](const Eigen::VectorXd& x) -> double {
                try {
                    const CopulaParams p = chart.to_params(x);
                    const CopulaDensityEval ev(family, p, d, opts.skewt_margin_cells);
                    const double ll = ev.total_log_density(U);
                    return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
                } catch (const std::exception&) {
                    return std::numeric_limits<double>::infinity();
                }
            };
            int evals = std::min(opts.nm_evals_cap, opts.nm_evals_per_param * chart.dim());
            if (opts.warm_start) evals = std::max(60, evals / 3);
            OptimResult nm = nelder_mead(neg, chart.from_params(p0), 0.15, 1e-10, evals);
            fit.params = chart.to_params(nm.x);
            fit.loglik = -nm.fmin;
            fit.converged = nm.converged;
            fit.boundary_hit =
                fit.params.nu < opts.nu_lo + 0.3 || fit.params.nu > opts.nu_hi * 0.95;
            // The symmetric-t solution must never lose to a skewed one by
            // optimizer shortfall alone.
            if (symmetric_ll > fit.loglik) {
                fit.params = p0;
                fit.loglik = symmetric_ll;
            }
            break;
        }
        case CopulaFamily::Clayton:
        case CopulaFamily::Gumbel:
        case CopulaFamily::Frank: {
            auto neg = [&](double x) -> double {
                const double theta = chart.theta_of(x);
                double ll = 0.0;
                Eigen::VectorXd row(d);
                for (int t = 0; t < T; ++t) {
                    row = U.row(t).transpose();
                    const double lc = family == CopulaFamily::Clayton
                                          ? clayton_log_density(row, theta)
                                          : family == CopulaFamily::Gumbel
                                                ? gumbel_log_density(row, theta)
                                                : frank_log_density(row, theta);
                    ll += lc;
                    if (!std::isfinite(ll)) return std::numeric_limits<double>::infinity();
                }
                return -ll;
            };
            double lo = -8.0, hi = 5.0;
            if (family == CopulaFamily::Frank && d == 2) {
                lo = -60.0;
                hi = 60.0;
            }
            auto res = grid_then_brent(neg, lo, hi, 41, 1e-9);
            fit.params.theta = chart.theta_of(res.x[0]);
            fit.loglik = -res.fmin;
            break;
        }
    }

    fit.param_names = fit_detail::copula_param_names(family, d);
    fit.param_values = fit_detail::copula_param_values(family, fit.params, d);
    fit.bic = fit.n_params() * std::log(static_cast<double>(T)) - 2.0 * fit.loglik;
    if (opts.compute_se) copula_fit_standard_errors(fit, u, opts);
    return fit;
}

struct CopulaGridCell {
    CopulaFamily family;
    double bic = std::numeric_limits<double>::quiet_NaN();
    double loglik = std::numeric_limits<double>::quiet_NaN();
    bool ok = false;
    std::string error;
};

struct CopulaSelection {
    CopulaFit best;
    std::vector<CopulaGridCell> table;
};

/// Fits each candidate family and keeps the BIC-minimal one; the winner gets
/// standard errors, the table keeps every attempt. BIC ties break toward
/// fewer parameters, then enumeration order.
inline CopulaSelection select_copula(const PseudoSample& u,
                                     const std::vector<CopulaFamily>& families,
                                     const CopulaFitOptions& opts = {}) {
    if (families.size() < 2) throw std::invalid_argument("select_copula: need >= 2 families");
    CopulaSelection sel;
    bool have_best = false;
    CopulaFitOptions fit_opts = opts;
    fit_opts.compute_se = false;
    for (CopulaFamily fam : families) {
        CopulaGridCell cell;
        cell.family = fam;
        try {
            CopulaFit f = fit_copula(fam, u, fit_opts);
            cell.bic = f.bic;
            cell.loglik = f.loglik;
            cell.ok = true;
            const bool better = !have_best || f.bic < sel.best.bic - 1e-9 ||
                                (std::abs(f.bic - sel.best.bic) <= 1e-9 &&
                                 f.n_params() < sel.best.n_params());
            if (better) {
                sel.best = std::move(f);
                have_best = true;
            }
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
        sel.table.push_back(cell);
    }
    if (!have_best) throw std::runtime_error("select_copula: all family fits failed");
    if (opts.compute_se) copula_fit_standard_errors(sel.best, u, opts);
    return sel;
}

// ---------------------------------------------------------------------------
// Two-step estimation over a return panel
// ---------------------------------------------------------------------------

struct TwoStepOptions {
    std::vector<int> p_grid{1, 2};
    std::vector<int> q_grid{0, 1, 2};
    std::vector<InnovationFamily> marginal_families{
        InnovationFamily::Gaussian, InnovationFamily::StudentT, InnovationFamily::SkewGaussian,
        InnovationFamily::SkewT};
    GarchFitOptions garch;
    CopulaFitOptions copula;
    std::vector<CopulaFamily> copula_families{CopulaFamily::Gaussian, CopulaFamily::StudentT,
                                              CopulaFamily::SkewT, CopulaFamily::Clayton,
                                              CopulaFamily::Frank, CopulaFamily::Gumbel};
};

struct PairCopulaFit {
    int i = 0, j = 0;  // column indices, i < j
    CopulaSelection selection;
};

struct TwoStepFit {
    PseudoSource mode = PseudoSource::Ecdf;
    std::vector<GarchSelection> marginals;  // parametric mode only
    PseudoSample pseudo;
    CopulaSelection joint;             // d-variate selection
    std::vector<PairCopulaFit> pairs;  // all d(d-1)/2 pairs
};

/// First stage: marginal models (skipped in the rank-based mode); second
/// stage: d-variate and all pairwise copula selections on the resulting
/// pseudo-observations.
inline TwoStepFit two_step_fit(const ReturnPanel& panel, PseudoSource mode,
                               const TwoStepOptions& opts = {}) {
    TwoStepFit out;
    out.mode = mode;
    if (mode == PseudoSource::ParametricPit) {
        std::vector<GarchFit> fits;
        for (int j = 0; j < panel.dim(); ++j) {
            out.marginals.push_back(select_garch(panel.column(j), opts.p_grid, opts.q_grid,
                                                 opts.marginal_families, opts.garch));
            fits.push_back(out.marginals.back().best);
        }
        out.pseudo = pit_pseudo_obs(panel, fits);
    } else {
        out.pseudo = ecdf_pseudo_obs(panel);
    }
    out.joint = select_copula(out.pseudo, opts.copula_families, opts.copula);
    for (int i = 0; i < panel.dim(); ++i) {
        for (int j = i + 1; j < panel.dim(); ++j) {
            PairCopulaFit pf;
            pf.i = i;
            pf.j = j;
            pf.selection =
                select_copula(pseudo_pair(out.pseudo, i, j), opts.copula_families, opts.copula);
            out.pairs.push_back(std::move(pf));
        }
    }
    return out;
}

}  // namespace codep
