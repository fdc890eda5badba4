#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "codep/copula_fit.hpp"
#include "codep/pseudo.hpp"
#include "codep/quadrature.hpp"

namespace codep {

// ---------------------------------------------------------------------------
// Sample rank correlations
// ---------------------------------------------------------------------------

/// Kendall's tau-b by Knight's O(n log n) algorithm: sort by (x, y), count
/// exchanges with a merge sort over y, and correct for ties.
inline double sample_kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (y.size() != n) throw std::invalid_argument("kendall tau: length mismatch");
    if (n < 2) throw std::invalid_argument("kendall tau: need n >= 2");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    // Tie counts: pairs tied in x (n1), tied in both (n3).
    double n1 = 0.0, n3 = 0.0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
            const double t = static_cast<double>(j - i + 1);
            n1 += t * (t - 1.0) / 2.0;
            std::size_t a = i;
            while (a <= j) {
                std::size_t b = a;
                while (b + 1 <= j && y[idx[b + 1]] == y[idx[a]]) ++b;
                const double s = static_cast<double>(b - a + 1);
                n3 += s * (s - 1.0) / 2.0;
                a = b + 1;
            }
            i = j + 1;
        }
    }
    // Pairs tied in y (n2).
    double n2 = 0.0;
    {
        std::vector<double> ys(y);
        std::sort(ys.begin(), ys.end());
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && ys[j + 1] == ys[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            n2 += t * (t - 1.0) / 2.0;
            i = j + 1;
        }
    }

    // Exchange count: merge sort of the y sequence in x-order.
    std::vector<double> ys(n), buf(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[idx[i]];
    double swaps = 0.0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo < n; lo += 2 * width) {
            const std::size_t mid = std::min(lo + width, n), hi = std::min(lo + 2 * width, n);
            std::size_t a = lo, b = mid, k = lo;
            while (a < mid && b < hi) {
                if (ys[b] < ys[a]) {
                    swaps += static_cast<double>(mid - a);
                    buf[k++] = ys[b++];
                } else {
                    buf[k++] = ys[a++];
                }
            }
            while (a < mid) buf[k++] = ys[a++];
            while (b < hi) buf[k++] = ys[b++];
        }
        std::swap(ys, buf);
    }

    const double n0 = static_cast<double>(n) * (n - 1.0) / 2.0;
    const double num = n0 - n1 - n2 + n3 - 2.0 * swaps;
    const double denom = std::sqrt((n0 - n1) * (n0 - n2));
    if (!(denom > 0.0)) throw std::invalid_argument("kendall tau: constant input");
    return num / denom;
}

/// Pearson correlation of average ranks.
inline double sample_spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (y.size() != n) throw std::invalid_argument("spearman rho: length mismatch");
    if (n < 3) throw std::invalid_argument("spearman rho: need n >= 3");
    const auto rx = average_ranks(x), ry = average_ranks(y);
    const double m = (n + 1.0) / 2.0;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - m) * (ry[i] - m);
        sxx += (rx[i] - m) * (rx[i] - m);
        syy += (ry[i] - m) * (ry[i] - m);
    }
    if (!(sxx > 0.0 && syy > 0.0)) throw std::invalid_argument("spearman rho: constant input");
    return sxy / std::sqrt(sxx * syy);
}

// ---------------------------------------------------------------------------
// Copula-implied functionals
// ---------------------------------------------------------------------------

enum class FunctionalMethod { ClosedForm, Quadrature, LimitExtrapolation, Sample, MonteCarlo };

inline const char* to_string(FunctionalMethod m) {
    switch (m) {
        case FunctionalMethod::ClosedForm: return "closed_form";
        case FunctionalMethod::Quadrature: return "quadrature";
        case FunctionalMethod::LimitExtrapolation: return "limit_extrapolation";
        case FunctionalMethod::Sample: return "sample";
        case FunctionalMethod::MonteCarlo: return "monte_carlo";
    }
    return "?";
}

namespace dep_detail {

/// Graded panel layout on [eps, 1-eps]: geometric refinement toward both
/// corners so integrable density singularities are resolved.
inline std::vector<double> graded_breaks(double eps) {
    std::vector<double> lo{eps, 1e-7, 1e-5, 1e-3, 1e-2, 0.05, 0.15, 0.3, 0.5};
    std::vector<double> br;
    for (double v : lo)
        if (v >= eps) br.push_back(v);
    if (br.empty() || br.front() > eps) br.insert(br.begin(), eps);
    for (std::size_t i = lo.size() - 1; i-- > 0;) {
        const double v = 1.0 - lo[i];
        if (v <= 1.0 - eps) br.push_back(v);
    }
    br.push_back(1.0 - eps);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    return br;
}

/// Tensor integral over [eps,1-eps]^2 of f(u, v, log c(u,v)) with per-axis
/// margin scores cached. nodes_per_panel per axis per panel.
inline double copula_grid_integral(const CopulaDensityEval& ev,
                                   const std::function<double(double, double, double)>& f,
                                   double eps, int nodes_per_panel) {
    const auto breaks = graded_breaks(eps);
    std::vector<double> us, ws;
    for (std::size_t a = 0; a + 1 < breaks.size(); ++a) {
        std::vector<double> xs, xw;
        gl_on_interval(nodes_per_panel, breaks[a], breaks[a + 1], xs, xw);
        us.insert(us.end(), xs.begin(), xs.end());
        ws.insert(ws.end(), xw.begin(), xw.end());
    }
    const std::size_t n = us.size();
    std::vector<double> z0(n), z1(n);
    for (std::size_t i = 0; i < n; ++i) {
        z0[i] = ev.score(0, us[i]);
        z1[i] = ev.score(1, us[i]);
    }
    double total = 0.0;
    Eigen::VectorXd z(2);
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            z << z0[i], z1[j];
            row += ws[j] * f(us[i], us[j], ev.log_density_scores(z));
        }
        total += ws[i] * row;
    }
    return total;
}

struct CheckedIntegral {
    double value = 0.0;
    double err = 0.0;
};

inline CheckedIntegral copula_grid_integral_checked(
    const CopulaDensityEval& ev, const std::function<double(double, double, double)>& f,
    double eps, int nodes_per_panel) {
    const double coarse = copula_grid_integral(ev, f, eps, nodes_per_panel);
    const double fine = copula_grid_integral(ev, f, eps, 2 * nodes_per_panel);
    return {fine, std::abs(fine - coarse)};
}

inline void require_bivariate(const CopulaFit& fit, const char* who) {
    if (fit.dim != 2) throw std::invalid_argument(std::string(who) + ": bivariate fit required");
}

/// Debye function D1(x) = (1/x) int_0^x t/(e^t - 1) dt, valid for x != 0.
inline double debye1(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x / 4.0;
    const double val = integrate_1d_adaptive(
        [](double t) { return std::abs(t) < 1e-12 ? 1.0 : t / std::expm1(t); }, 0.0,
        x, 1e-12);
    return val / x;
}

}  // namespace dep_detail

struct ValueWithMethod {
    double value = 0.0;
    FunctionalMethod method = FunctionalMethod::ClosedForm;
    double mc_se = 0.0;  // only for Monte Carlo evaluations
};

/// Accuracy/effort knobs for model-implied functionals. Defaults meet the
/// documented tolerances; bootstrap replicates run a lighter configuration
/// since their output only feeds a standard deviation.
struct FunctionalEvalOptions {
    int nodes_per_panel = 8;      // per graded panel per axis (>= 128 nodes/axis total)
    bool doubling_check = true;   // re-integrate at 2x nodes and compare
    int skewt_margin_cells = 400;
    std::uint64_t mc_seed = 0x2545F4914F6CDD1DULL;
    int mc_n = 200000;  // skew-t tau Monte Carlo sample size
};

inline FunctionalEvalOptions light_functional_options() {
    FunctionalEvalOptions o;
    o.nodes_per_panel = 6;
    o.doubling_check = false;
    o.skewt_margin_cells = 200;
    o.mc_n = 40000;
    return o;
}

/// Spearman's rho of the fitted copula: closed form for the gaussian family,
/// CDF quadrature for the closed-form Archimedean CDFs, and the equivalent
/// density-moment form 12 E[UV] - 3 for t and skew-t (same integral after
/// integration by parts; much cheaper than quadrature of a numerical CDF).
inline ValueWithMethod copula_spearman_rho(const CopulaFit& fit,
                                           const FunctionalEvalOptions& opts = {}) {
    dep_detail::require_bivariate(fit, "copula_spearman_rho");
    const CopulaParams& p = fit.params;
    switch (fit.family) {
        case CopulaFamily::Gaussian:
            return {6.0 / pi_v * std::asin(0.5 * p.rho()), FunctionalMethod::ClosedForm, 0.0};
        case CopulaFamily::Clayton:
        case CopulaFamily::Gumbel:
        case CopulaFamily::Frank: {
            auto C = [&](double u, double v) {
                Eigen::VectorXd w(2);
                w << u, v;
                return fit.family == CopulaFamily::Clayton ? clayton_cdf(w, p.theta)
                       : fit.family == CopulaFamily::Gumbel ? gumbel_cdf(w, p.theta)
                                                            : frank_cdf(w, p.theta);
            };
            const double fine = integrate_2d(C, 0.0, 1.0, opts.doubling_check ? 128 : 64);
            return {12.0 * fine - 3.0, FunctionalMethod::Quadrature, 0.0};
        }
        case CopulaFamily::StudentT:
        case CopulaFamily::SkewT: {
            const CopulaDensityEval ev(fit.family, p, 2, opts.skewt_margin_cells);
            auto f = [](double u, double v, double logc) { return u * v * std::exp(logc); };
            const double e_uv =
                opts.doubling_check
                    ? dep_detail::copula_grid_integral_checked(ev, f, 1e-9, opts.nodes_per_panel)
                          .value
                    : dep_detail::copula_grid_integral(ev, f, 1e-9, opts.nodes_per_panel);
            return {12.0 * e_uv - 3.0, FunctionalMethod::Quadrature, 0.0};
        }
    }
    throw std::logic_error("unreachable");
}

/// Kendall's tau of the fitted copula; closed forms everywhere except the
/// skew-t, which uses a batched Monte Carlo estimate with a reported SE.
inline ValueWithMethod copula_kendall_tau(const CopulaFit& fit,
                                          std::uint64_t mc_seed = 0x2545F4914F6CDD1DULL,
                                          int mc_n = 200000) {
    dep_detail::require_bivariate(fit, "copula_kendall_tau");
    const CopulaParams& p = fit.params;
    switch (fit.family) {
        case CopulaFamily::Gaussian:
        case CopulaFamily::StudentT:
            return {2.0 / pi_v * std::asin(p.rho()), FunctionalMethod::ClosedForm, 0.0};
        case CopulaFamily::Clayton:
            return {p.theta / (p.theta + 2.0), FunctionalMethod::ClosedForm, 0.0};
        case CopulaFamily::Gumbel:
            return {1.0 - 1.0 / p.theta, FunctionalMethod::ClosedForm, 0.0};
        case CopulaFamily::Frank:
            return {1.0 - 4.0 / p.theta * (1.0 - dep_detail::debye1(p.theta)),
                    FunctionalMethod::ClosedForm, 0.0};
        case CopulaFamily::SkewT: {
            Rng rng(mc_seed);
            const int batches = 20, per = mc_n / batches;
            std::vector<double> taus(batches);
            for (int b = 0; b < batches; ++b) {
                const Eigen::MatrixXd U = sample_copula(fit.family, p, 2, per, rng);
                std::vector<double> xs(per), ys(per);
                for (int t = 0; t < per; ++t) {
                    xs[t] = U(t, 0);
                    ys[t] = U(t, 1);
                }
                taus[b] = sample_kendall_tau(xs, ys);
            }
            double m = 0.0, s2 = 0.0;
            for (double t : taus) m += t;
            m /= batches;
            for (double t : taus) s2 += (t - m) * (t - m);
            s2 /= (batches - 1.0);
            return {m, FunctionalMethod::MonteCarlo, std::sqrt(s2 / batches)};
        }
    }
    throw std::logic_error("unreachable");
}

struct TailDependence {
    double lambda_l = 0.0, lambda_u = 0.0;
    FunctionalMethod method = FunctionalMethod::ClosedForm;
    // For numerically extrapolated values: the range spanned by the finite-v
    // evaluations plus the extrapolant.
    double lambda_l_lo = 0.0, lambda_l_hi = 0.0;
    double lambda_u_lo = 0.0, lambda_u_hi = 0.0;
};

namespace dep_detail {
/// Richardson-style extrapolation from evaluations at h, h/10, h/100.
inline double extrapolate_limit(const std::vector<double>& v) {
    const double d1 = v[1] - v[0], d2 = v[2] - v[1];
    if (std::abs(d2) < 1e-14 || !(d1 * d2 > 0.0)) return v[2];
    const double ratio = d1 / d2;  // ~= 10^p for error C h^p
    if (!(ratio > 1.0)) return v[2];
    return v[2] + d2 / (ratio - 1.0);
}
}  // namespace dep_detail

/// Lower/upper tail dependence. Closed forms for gaussian, t, clayton,
/// gumbel, frank; the skew-t evaluates the defining limits at
/// v in {1e-2, 1e-3, 1e-4} (and mirrored for the upper tail) with
/// extrapolation and a reported bracket.
inline TailDependence tail_dependence(const CopulaFit& fit, int skewt_margin_cells = 600) {
    dep_detail::require_bivariate(fit, "tail_dependence");
    const CopulaParams& p = fit.params;
    TailDependence td;
    switch (fit.family) {
        case CopulaFamily::Gaussian:
            if (std::abs(p.rho()) >= 1.0 - 1e-12) td.lambda_l = td.lambda_u = 1.0;
            break;
        case CopulaFamily::StudentT: {
            const double lam =
                2.0 * t_cdf(-std::sqrt((p.nu + 1.0) * (1.0 - p.rho()) / (1.0 + p.rho())),
                            p.nu + 1.0);
            td.lambda_l = td.lambda_u = lam;
            break;
        }
        case CopulaFamily::Clayton:
            td.lambda_l = p.theta > 0.0 ? std::exp(-std::log(2.0) / p.theta) : 0.0;
            break;
        case CopulaFamily::Gumbel:
            td.lambda_u = 2.0 - std::exp(std::log(2.0) / p.theta);
            break;
        case CopulaFamily::Frank:
            break;
        case CopulaFamily::SkewT: {
            const SkewTCopula cop(p.corr, p.delta, p.nu, skewt_margin_cells);
            std::vector<double> lo, up;
            for (double h : {1e-2, 1e-3, 1e-4}) {
                lo.push_back(cop.cdf2(h, h) / h);
                const double v = 1.0 - h;
                up.push_back((1.0 - 2.0 * v + cop.cdf2(v, v)) / h);
            }
            td.method = FunctionalMethod::LimitExtrapolation;
            td.lambda_l = std::clamp(dep_detail::extrapolate_limit(lo), 0.0, 1.0);
            td.lambda_u = std::clamp(dep_detail::extrapolate_limit(up), 0.0, 1.0);
            lo.push_back(td.lambda_l);
            up.push_back(td.lambda_u);
            td.lambda_l_lo = *std::min_element(lo.begin(), lo.end());
            td.lambda_l_hi = *std::max_element(lo.begin(), lo.end());
            td.lambda_u_lo = *std::min_element(up.begin(), up.end());
            td.lambda_u_hi = *std::max_element(up.begin(), up.end());
            break;
        }
    }
    if (td.method == FunctionalMethod::ClosedForm) {
        td.lambda_l_lo = td.lambda_l_hi = td.lambda_l;
        td.lambda_u_lo = td.lambda_u_hi = td.lambda_u;
    }
    return td;
}

struct QuadratureFunctional {
    double value = 0.0;
    double quad_err = 0.0;  // node-doubling discrepancy
};

namespace dep_detail {
inline QuadratureFunctional quad_functional(
    const CopulaFit& fit, const std::function<double(double, double, double)>& f,
    const FunctionalEvalOptions& opts, const char* who) {
    require_bivariate(fit, who);
    const CopulaDensityEval ev(fit.family, fit.params, 2, opts.skewt_margin_cells);
    if (!opts.doubling_check)
        return {copula_grid_integral(ev, f, 1e-9, opts.nodes_per_panel), 0.0};
    const auto I = copula_grid_integral_checked(ev, f, 1e-9, opts.nodes_per_panel);
    if (I.err > 1e-3)
        throw std::runtime_error(std::string(who) + ": quadrature did not converge");
    return {I.value, I.err};
}
}  // namespace dep_detail

/// Mutual information I = int c log c, mapped to delta^2 = 1 - exp(-2I).
/// Quadrature runs on graded panels over [1e-9, 1-1e-9]^2 with >= 128 nodes
/// per axis; a node-doubling discrepancy above 1e-3 raises an error.
inline QuadratureFunctional mutual_information_delta2(const CopulaFit& fit,
                                                      const FunctionalEvalOptions& opts = {}) {
    auto f = [](double, double, double logc) {
        const double c = std::exp(logc);
        return c > 0.0 ? c * logc : 0.0;
    };
    auto I = dep_detail::quad_functional(fit, f, opts, "mutual_information_delta2");
    I.value = std::clamp(1.0 - std::exp(-2.0 * std::max(I.value, 0.0)), 0.0, 1.0);
    return I;
}

/// Hellinger correlation H^2 = 1 - int sqrt(c); same engine as delta^2.
inline QuadratureFunctional hellinger_correlation(const CopulaFit& fit,
                                                  const FunctionalEvalOptions& opts = {}) {
    auto f = [](double, double, double logc) { return std::exp(0.5 * logc); };
    auto I = dep_detail::quad_functional(fit, f, opts, "hellinger_correlation");
    I.value = std::clamp(1.0 - I.value, 0.0, 1.0);
    return I;
}

/// Normalised Bhattacharya-Matusita-Hellinger index; algebraically the same
/// integral as hellinger_correlation under the copula representation, and
/// computed by the same code path so the identity holds to rounding.
inline QuadratureFunctional bhattacharya_s_rho(const CopulaFit& fit,
                                               const FunctionalEvalOptions& opts = {}) {
    return hellinger_correlation(fit, opts);
}

struct FunctionalSet {
    ValueWithMethod rho_s, tau;
    TailDependence tails;
    QuadratureFunctional delta2, h2, s_rho;
};

/// All six dependence functionals of a fitted bivariate copula.
inline FunctionalSet functional_set(const CopulaFit& fit,
                                    const FunctionalEvalOptions& opts = {}) {
    FunctionalSet fs;
    fs.rho_s = copula_spearman_rho(fit, opts);
    fs.tau = copula_kendall_tau(fit, opts.mc_seed, opts.mc_n);
    fs.tails = tail_dependence(fit, std::max(300, opts.skewt_margin_cells));
    fs.delta2 = mutual_information_delta2(fit, opts);
    fs.h2 = hellinger_correlation(fit, opts);
    fs.s_rho = bhattacharya_s_rho(fit, opts);
    return fs;
}

// ---------------------------------------------------------------------------
// Distance covariance independence test
// ---------------------------------------------------------------------------

struct IndependenceTest {
    double v2 = 0.0;       // distance correlation in [0,1]
    double p_value = 1.0;
    int n_permutations = 0;
    double dcov2 = 0.0;    // raw squared sample distance covariance
};

/// Permutation test of independence between the rows of x and y based on the
/// squared sample distance covariance (double-centered pairwise distances).
/// The reported statistic is the distance correlation; the permutation
/// p-value is (1 + #{permuted >= observed})/(B + 1).
inline IndependenceTest distance_covariance_test(const Eigen::MatrixXd& x,
                                                 const Eigen::MatrixXd& y, int B, Rng rng) {
    const int n = static_cast<int>(x.rows());
    if (y.rows() != n) throw std::invalid_argument("distance covariance: row mismatch");
    if (n < 10) throw std::invalid_argument("distance covariance: need n >= 10");
    if (B < 99) throw std::invalid_argument("distance covariance: need B >= 99");

    auto centered = [&](const Eigen::MatrixXd& m) {
        Eigen::MatrixXd A(n, n);
        for (int i = 0; i < n; ++i) {
            A(i, i) = 0.0;
            for (int j = i + 1; j < n; ++j) {
                const double d = (m.row(i) - m.row(j)).norm();
                A(i, j) = A(j, i) = d;
            }
        }
        const Eigen::VectorXd rm = A.rowwise().mean();
        const double gm = rm.mean();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) += gm - rm[i] - rm[j];
        return A;
    };

    const Eigen::MatrixXd A = centered(x), Bm = centered(y);
    const double n2 = static_cast<double>(n) * n;
    const double vxy = (A.array() * Bm.array()).sum() / n2;
    const double vxx = (A.array() * A.array()).sum() / n2;
    const double vyy = (Bm.array() * Bm.array()).sum() / n2;
    if (!(vxx > 0.0) || !(vyy > 0.0))
        throw std::invalid_argument("distance covariance: a block is constant");

    IndependenceTest res;
    res.dcov2 = vxy;
    res.v2 = std::sqrt(std::max(0.0, vxy) / std::sqrt(vxx * vyy));
    res.n_permutations = B;

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    int count = 0;
    for (int b = 0; b < B; ++b) {
        for (int i = n - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i + 1))]);
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            const int pi = perm[i];
            for (int j = 0; j < n; ++j) s += A(i, j) * Bm(pi, perm[j]);
        }
        if (s / n2 >= vxy) ++count;
    }
    res.p_value = (1.0 + count) / (B + 1.0);
    return res;
}

}  // namespace codep
