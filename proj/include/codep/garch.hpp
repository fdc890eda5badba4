#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "codep/innovations.hpp"
#include "codep/optimize.hpp"
#include "codep/rng.hpp"

namespace codep {

/// Hard ceiling on estimated degrees of freedom; hitting it is reported.
inline constexpr double kNuUpperBound = 100.0;

struct GarchSpec {
    int p = 1;  // ARCH order (squared-return lags); 0 allowed as a constant-variance baseline
    int q = 1;  // GARCH order (lagged-variance terms)
    InnovationSpec innovation;

    void validate() const {
        if (p < 0 || q < 0 || p + q < 1)
            throw std::invalid_argument("GARCH orders must satisfy p,q >= 0 and p+q >= 1");
        innovation.validate();
    }

    int n_params() const { return 1 + p + q + innovation.n_params(); }

    std::string label() const {
        return std::string("garch(") + std::to_string(p) + "," + std::to_string(q) + ")-" +
               to_string(innovation.family);
    }
};

struct GarchParams {
    double alpha0 = 1e-5;
    std::vector<double> alpha;  // p ARCH coefficients, >= 0
    std::vector<double> beta;   // q GARCH coefficients, >= 0
    double nu = 8.0;
    double lambda = 1.0;

    double persistence() const {
        return std::accumulate(alpha.begin(), alpha.end(), 0.0) +
               std::accumulate(beta.begin(), beta.end(), 0.0);
    }

    double unconditional_variance() const { return alpha0 / (1.0 - persistence()); }

    void validate(const GarchSpec& spec) const {
        if (static_cast<int>(alpha.size()) != spec.p || static_cast<int>(beta.size()) != spec.q)
            throw std::invalid_argument("GARCH parameter vector does not match spec orders");
        if (!(alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be positive");
        for (double a : alpha)
            if (a < 0.0) throw std::invalid_argument("ARCH coefficients must be nonnegative");
        for (double b : beta)
            if (b < 0.0) throw std::invalid_argument("GARCH coefficients must be nonnegative");
        if (!(persistence() < 1.0))
            throw std::invalid_argument("nonstationary parameters: sum(alpha)+sum(beta) >= 1");
    }
};

enum class VarianceSeed { Unconditional, SampleVariance };

/// Conditional volatility recursion. Pre-sample sigma^2 and y^2 terms are the
/// seed value (unconditional variance by default, sample variance of y on
/// request). Output has one sigma per observation and is strictly positive.
inline std::vector<double> garch_filter(const std::vector<double>& y, const GarchSpec& spec,
                                        const GarchParams& params,
                                        VarianceSeed seed = VarianceSeed::Unconditional) {
    params.validate(spec);
    const int T = static_cast<int>(y.size());
    const int p = spec.p, q = spec.q;
    if (T <= std::max(p, q)) throw std::invalid_argument("series shorter than the GARCH order");

    double seed_var;
    if (seed == VarianceSeed::Unconditional) {
        seed_var = params.unconditional_variance();
    } else {
        double m = 0.0, v = 0.0;
        for (double yt : y) m += yt;
        m /= T;
        for (double yt : y) v += (yt - m) * (yt - m);
        seed_var = v / T;
        if (!(seed_var > 0.0)) seed_var = params.unconditional_variance();
    }

    std::vector<double> sig2(T);
    for (int t = 0; t < T; ++t) {
        double s = params.alpha0;
        for (int i = 1; i <= p; ++i) {
            const int idx = t - i;
            const double y2 = idx >= 0 ? y[idx] * y[idx] : seed_var;
            s += params.alpha[i - 1] * y2;
        }
        for (int j = 1; j <= q; ++j) {
            const int idx = t - j;
            s += params.beta[j - 1] * (idx >= 0 ? sig2[idx] : seed_var);
        }
        sig2[t] = s;
    }
    std::vector<double> sigma(T);
    for (int t = 0; t < T; ++t) sigma[t] = std::sqrt(sig2[t]);
    return sigma;
}

/// Sum over t of log f_eps(y_t/sigma_t) - log sigma_t.
inline double garch_loglik(const std::vector<double>& y, const GarchSpec& spec,
                           const GarchParams& params,
                           VarianceSeed seed = VarianceSeed::Unconditional) {
    InnovationSpec inn = spec.innovation;
    inn.nu = params.nu;
    inn.lambda = params.lambda;
    const InnovationDist dist(inn);
    const auto sigma = garch_filter(y, spec, params, seed);
    double ll = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t)
        ll += dist.log_pdf(y[t] / sigma[t]) - std::log(sigma[t]);
    return ll;
}

struct GarchFit {
    GarchSpec spec;
    GarchParams params;
    std::vector<std::string> param_names;
    std::vector<double> param_values;
    std::vector<double> std_errors;  // NaN entries when the Hessian is not usable
    bool se_ok = false;
    bool converged = false;
    bool nu_at_bound = false;
    double loglik = 0.0;
    double bic = 0.0;      // normalized: (k ln T - 2 loglik)/T
    double bic_raw = 0.0;  // k ln T - 2 loglik
    std::vector<double> sigma;
    std::vector<double> residuals;  // y_t / sigma_t
};

namespace detail {

/// Unconstrained chart for GARCH parameters: log(alpha0); a multinomial-logit
/// simplex for the p+q nonnegative coefficients (their sum stays below 1);
/// a bounded-log map for nu in (2, kNuUpperBound); log(lambda).
struct GarchChart {
    GarchSpec spec;
    int dim() const { return spec.n_params(); }

    GarchParams to_params(const Eigen::VectorXd& x) const {
        GarchParams p;
        int k = 0;
        p.alpha0 = std::exp(x[k++]);
        const int m = spec.p + spec.q;
        double denom = 1.0;
        std::vector<double> e(m);
        for (int i = 0; i < m; ++i) {
            e[i] = std::exp(std::min(x[k + i], 30.0));
            denom += e[i];
        }
        p.alpha.resize(spec.p);
        p.beta.resize(spec.q);
        for (int i = 0; i < spec.p; ++i) p.alpha[i] = e[i] / denom;
        for (int j = 0; j < spec.q; ++j) p.beta[j] = e[spec.p + j] / denom;
        k += m;
        if (spec.innovation.has_nu()) {
            const double s = 1.0 / (1.0 + std::exp(-x[k++]));
            p.nu = 2.0 + (kNuUpperBound - 2.0) * s;
        }
        if (spec.innovation.has_lambda()) p.lambda = std::exp(x[k++]);
        return p;
    }

    Eigen::VectorXd from_params(const GarchParams& p) const {
        Eigen::VectorXd x(dim());
        int k = 0;
        x[k++] = std::log(p.alpha0);
        const int m = spec.p + spec.q;
        const double rest = 1.0 - p.persistence();
        auto logit_coef = [&](double c) { return std::log(std::max(c, 1e-8) / std::max(rest, 1e-8)); };
        for (int i = 0; i < spec.p; ++i) x[k + i] = logit_coef(p.alpha[i]);
        for (int j = 0; j < spec.q; ++j) x[k + spec.p + j] = logit_coef(p.beta[j]);
        k += m;
        if (spec.innovation.has_nu()) {
            const double s = (p.nu - 2.0) / (kNuUpperBound - 2.0);
            x[k++] = std::log(s / (1.0 - s));
        }
        if (spec.innovation.has_lambda()) x[k++] = std::log(p.lambda);
        return x;
    }

    InnovationSpec innovation_at(const GarchParams& p) const {
        InnovationSpec s = spec.innovation;
        s.nu = p.nu;
        s.lambda = p.lambda;
        return s;
    }
};

inline std::vector<std::string> garch_param_names(const GarchSpec& spec) {
    std::vector<std::string> names{"alpha0"};
    for (int i = 1; i <= spec.p; ++i) names.push_back("alpha" + std::to_string(i));
    for (int j = 1; j <= spec.q; ++j) names.push_back("beta" + std::to_string(j));
    if (spec.innovation.has_nu()) names.push_back("nu");
    if (spec.innovation.has_lambda()) names.push_back("lambda");
    return names;
}

inline std::vector<double> garch_param_values(const GarchSpec& spec, const GarchParams& p) {
    std::vector<double> v{p.alpha0};
    v.insert(v.end(), p.alpha.begin(), p.alpha.end());
    v.insert(v.end(), p.beta.begin(), p.beta.end());
    if (spec.innovation.has_nu()) v.push_back(p.nu);
    if (spec.innovation.has_lambda()) v.push_back(p.lambda);
    return v;
}

}  // namespace detail

struct GarchFitOptions {
    VarianceSeed seed_mode = VarianceSeed::Unconditional;
    int restarts = 3;
    int max_evals = 4000;
    std::uint64_t rng_seed = 0x6a09e667f3bcc908ULL;  // jitters the restart points only
    int warn_below_length = 250;
};

/// Maximum likelihood fit of one GARCH spec. Optimizes with Nelder-Mead plus
/// randomized restarts on the unconstrained chart, then a quasi-Newton
/// polish. Standard errors come from the inverse numerical Hessian at the
/// optimum (computed on the chart and mapped back by the delta method, which
/// keeps the differencing well scaled for alpha0 ~ 1e-6).
inline GarchFit fit_garch(const std::vector<double>& y, const GarchSpec& spec,
                          const GarchFitOptions& opts = {}) {
    spec.validate();
    const int T = static_cast<int>(y.size());
    if (T < 10) throw std::invalid_argument("fit_garch: series too short");
    {
        double m = 0.0, v = 0.0;
        for (double yt : y) m += yt;
        m /= T;
        for (double yt : y) v += (yt - m) * (yt - m);
        if (!(v > 0.0)) throw std::invalid_argument("fit_garch: zero-variance series");
    }

    const detail::GarchChart chart{spec};
    auto objective = [&](const Eigen::VectorXd& x) -> double {
        const GarchParams p = chart.to_params(x);
        double ll;
        try {
            ll = garch_loglik(y, spec, p, opts.seed_mode);
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };

    // Moment-matched start: distribute persistence and set alpha0 so the
    // unconditional variance equals the sample variance.
    double sample_var = 0.0, mean = 0.0;
    for (double v : y) mean += v;
    mean /= T;
    for (double v : y) sample_var += (v - mean) * (v - mean);
    sample_var /= T;

    GarchParams start;
    const double persist = spec.q > 0 ? 0.90 : std::min(0.30, 0.9 / std::max(1, spec.p));
    start.alpha.assign(spec.p, 0.0);
    start.beta.assign(spec.q, 0.0);
    const double arch_share = spec.q > 0 ? 0.08 : persist;
    for (int i = 0; i < spec.p; ++i) start.alpha[i] = arch_share / std::max(1, spec.p);
    for (int j = 0; j < spec.q; ++j)
        start.beta[j] = (persist - arch_share * (spec.p > 0 ? 1.0 : 0.0)) / std::max(1, spec.q);
    start.alpha0 = sample_var * (1.0 - start.persistence());
    start.nu = 8.0;
    start.lambda = 1.0;

    Rng rng(opts.rng_seed);
    OptimResult best;
    const Eigen::VectorXd x_start = chart.from_params(start);
    for (int r = 0; r <= opts.restarts; ++r) {
        Eigen::VectorXd x0 = x_start;
        if (r > 0)
            for (int i = 0; i < x0.size(); ++i) x0[i] += 0.5 * (2.0 * rng.uniform() - 1.0);
        OptimResult nm = nelder_mead(objective, x0, 0.25, 1e-12, opts.max_evals);
        if (nm.fmin < best.fmin) best = nm;
    }
    if (!std::isfinite(best.fmin)) throw std::runtime_error("fit_garch: optimizer failed to start");
    OptimResult polished = bfgs_polish(objective, best.x);
    if (polished.fmin < best.fmin) best = polished;

    GarchFit fit;
    fit.spec = spec;
    fit.params = chart.to_params(best.x);
    fit.converged = best.converged && std::isfinite(best.fmin);
    fit.loglik = -best.fmin;
    const int k = spec.n_params();
    fit.bic_raw = k * std::log(static_cast<double>(T)) - 2.0 * fit.loglik;
    fit.bic = fit.bic_raw / T;
    fit.param_names = detail::garch_param_names(spec);
    fit.param_values = detail::garch_param_values(spec, fit.params);
    fit.nu_at_bound = spec.innovation.has_nu() && fit.params.nu > 0.95 * kNuUpperBound;

    fit.sigma = garch_filter(y, spec, fit.params, opts.seed_mode);
    fit.residuals.resize(T);
    for (int t = 0; t < T; ++t) fit.residuals[t] = y[t] / fit.sigma[t];

    // Standard errors: inverse Hessian of -loglik on the chart, delta-mapped
    // to the natural parameters.
    fit.std_errors.assign(k, std::numeric_limits<double>::quiet_NaN());
    const Eigen::MatrixXd Hx = numerical_hessian(objective, best.x);
    Eigen::LLT<Eigen::MatrixXd> llt(Hx);
    if (llt.info() == Eigen::Success) {
        const Eigen::MatrixXd cov_x = llt.solve(Eigen::MatrixXd::Identity(k, k));
        // Jacobian d(theta)/d(x) by forward differences of the chart map.
        Eigen::MatrixXd J(k, k);
        const std::vector<double> th0 = detail::garch_param_values(spec, chart.to_params(best.x));
        for (int j = 0; j < k; ++j) {
            Eigen::VectorXd xp = best.x;
            const double h = 1e-6 * std::max(1.0, std::abs(best.x[j]));
            xp[j] += h;
            const std::vector<double> thp = detail::garch_param_values(spec, chart.to_params(xp));
            for (int i = 0; i < k; ++i) J(i, j) = (thp[i] - th0[i]) / h;
        }
        const Eigen::MatrixXd cov_theta = J * cov_x * J.transpose();
        bool ok = true;
        for (int i = 0; i < k; ++i) {
            const double v = cov_theta(i, i);
            if (!(v >= 0.0) || !std::isfinite(v)) ok = false;
        }
        if (ok) {
            for (int i = 0; i < k; ++i) fit.std_errors[i] = std::sqrt(cov_theta(i, i));
            fit.se_ok = true;
        }
    }
    return fit;
}

struct GarchGridCell {
    GarchSpec spec;
    double bic = std::numeric_limits<double>::quiet_NaN();
    double loglik = std::numeric_limits<double>::quiet_NaN();
    bool ok = false;
    std::string error;
};

struct GarchSelection {
    GarchFit best;
    std::vector<GarchGridCell> table;
};

inline int innovation_rank(InnovationFamily f) {
    // Tie-break order: gaussian < student_t < skew_gaussian < skew_t.
    switch (f) {
        case InnovationFamily::Gaussian: return 0;
        case InnovationFamily::StudentT: return 1;
        case InnovationFamily::SkewGaussian: return 2;
        case InnovationFamily::SkewT: return 3;
    }
    return 4;
}

/// Fits every (p, q, family) combination and returns the BIC-minimal fit plus
/// the full grid. Ties break toward fewer parameters, then family order.
inline GarchSelection select_garch(const std::vector<double>& y, const std::vector<int>& p_grid,
                                   const std::vector<int>& q_grid,
                                   const std::vector<InnovationFamily>& families,
                                   const GarchFitOptions& opts = {}) {
    if (p_grid.empty() || q_grid.empty() || families.empty())
        throw std::invalid_argument("select_garch: empty grid");
    GarchSelection sel;
    bool have_best = false;
    GarchFit best;
    for (InnovationFamily fam : families) {
        for (int p : p_grid) {
            for (int q : q_grid) {
                GarchGridCell cell;
                cell.spec = GarchSpec{p, q, InnovationSpec{fam}};
                if (p + q < 1) {
                    cell.error = "p+q must be >= 1";
                    sel.table.push_back(cell);
                    continue;
                }
                try {
                    GarchFit fit = fit_garch(y, cell.spec, opts);
                    cell.bic = fit.bic;
                    cell.loglik = fit.loglik;
                    cell.ok = true;
                    const bool better =
                        !have_best || fit.bic < best.bic - 1e-12 ||
                        (std::abs(fit.bic - best.bic) <= 1e-12 &&
                         (fit.spec.n_params() < best.spec.n_params() ||
                          (fit.spec.n_params() == best.spec.n_params() &&
                           innovation_rank(fam) < innovation_rank(best.spec.innovation.family))));
                    if (better) {
                        best = std::move(fit);
                        have_best = true;
                    }
                } catch (const std::exception& e) {
                    cell.error = e.what();
                }
                sel.table.push_back(cell);
            }
        }
    }
    if (!have_best) throw std::runtime_error("select_garch: all fits failed");
    sel.best = std::move(best);
    return sel;
}

/// Simulates a GARCH path. Deterministic given the rng state; a short warmup
/// decays the influence of the unconditional-variance seed.
inline std::vector<double> simulate_garch(const GarchSpec& spec, const GarchParams& params, int T,
                                          Rng& rng, int warmup = 100) {
    spec.validate();
    params.validate(spec);
    InnovationSpec inn = spec.innovation;
    inn.nu = params.nu;
    inn.lambda = params.lambda;
    const InnovationDist dist(inn);

    const int p = spec.p, q = spec.q;
    const double uv = params.unconditional_variance();
    const int total = T + warmup;
    std::vector<double> y(total), sig2(total);
    for (int t = 0; t < total; ++t) {
        double s = params.alpha0;
        for (int i = 1; i <= p; ++i) s += params.alpha[i - 1] * (t - i >= 0 ? y[t - i] * y[t - i] : uv);
        for (int j = 1; j <= q; ++j) s += params.beta[j - 1] * (t - j >= 0 ? sig2[t - j] : uv);
        sig2[t] = s;
        y[t] = std::sqrt(s) * dist.sample(rng);
    }
    return {y.begin() + warmup, y.end()};
}

}  // namespace codep
