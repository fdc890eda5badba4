#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "codep/copula_params.hpp"
#include "codep/rng.hpp"

namespace codep {

namespace arch_detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log of a positive-coefficient polynomial evaluated at w > 0, done as
/// logsumexp over log(coef_m) + m log(w) so huge generator arguments cannot
/// overflow.
inline double log_poly(const std::vector<double>& coef, double log_w) {
    double m = kNegInf;
    std::vector<double> terms(coef.size(), kNegInf);
    for (std::size_t k = 0; k < coef.size(); ++k) {
        if (coef[k] <= 0.0) continue;
        terms[k] = std::log(coef[k]) + k * log_w;
        m = std::max(m, terms[k]);
    }
    if (!std::isfinite(m)) return kNegInf;
    double s = 0.0;
    for (double t : terms)
        if (std::isfinite(t)) s += std::exp(t - m);
    return m + std::log(s);
}

/// Coefficients of P_d for the Gumbel generator psi(t) = exp(-t^a):
/// |psi^(d)(t)| = psi(t) t^{ad-d} P_d(t^{-a}), built by the recursion
/// P_{k+1} = a P_k + k(1-a) w P_k + a w^2 P_k'.
inline std::vector<double> gumbel_deriv_poly(int d, double a) {
    std::vector<double> p{a};
    for (int k = 1; k < d; ++k) {
        std::vector<double> next(p.size() + 1, 0.0);
        for (std::size_t m = 0; m < p.size(); ++m) {
            next[m] += a * p[m];
            next[m + 1] += (k * (1.0 - a) + a * static_cast<double>(m)) * p[m];
        }
        p.swap(next);
    }
    return p;
}

/// Coefficients of Q_{d-1} for the Frank generator: |psi^(d)(t)| =
/// Q_{d-1}(y)/theta with y = x/(1-x), x = (1-e^{-theta}) e^{-t}, built by
/// Q_0 = y, Q_{m+1} = (y + y^2) Q_m'.
inline std::vector<double> frank_deriv_poly(int d) {
    std::vector<double> q{0.0, 1.0};  // Q_0(y) = y
    for (int m = 0; m + 1 < d; ++m) {
        std::vector<double> next(q.size() + 1, 0.0);
        for (std::size_t k = 1; k < q.size(); ++k) {
            next[k] += k * q[k];
            next[k + 1] += k * q[k];
        }
        q.swap(next);
    }
    return q;
}

}  // namespace arch_detail

// ---------------------------------------------------------------------------
// Clayton
// ---------------------------------------------------------------------------

inline double clayton_log_density(const Eigen::VectorXd& u, double theta) {
    const int d = static_cast<int>(u.size());
    if (std::abs(theta) < 1e-10) return 0.0;  // independence limit
    // base = Sum u_j^{-theta} - d + 1, assembled from expm1 terms for
    // stability near theta = 0.
    double base_m1 = 0.0, sum_log_u = 0.0;
    for (int j = 0; j < d; ++j) {
        sum_log_u += std::log(u[j]);
        base_m1 += std::expm1(-theta * std::log(u[j]));
    }
    if (base_m1 <= -1.0) return arch_detail::kNegInf;  // outside the support (theta < 0)
    double ll = -(1.0 + theta) * sum_log_u - (d + 1.0 / theta) * std::log1p(base_m1);
    for (int k = 1; k < d; ++k) ll += std::log(1.0 + k * theta);
    return ll;
}

inline double clayton_cdf(const Eigen::VectorXd& u, double theta) {
    const int d = static_cast<int>(u.size());
    if (std::abs(theta) < 1e-10) {
        double p = 1.0;
        for (int j = 0; j < d; ++j) p *= u[j];
        return p;
    }
    double base_m1 = 0.0;
    for (int j = 0; j < d; ++j) base_m1 += std::expm1(-theta * std::log(u[j]));
    if (base_m1 <= -1.0) return 0.0;
    return std::exp(-std::log1p(base_m1) / theta);
}

inline void sample_clayton(double theta, int d, int n, Rng& rng, Eigen::MatrixXd& out) {
    out.resize(n, d);
    if (std::abs(theta) < 1e-8) {
        for (int t = 0; t < n; ++t)
            for (int j = 0; j < d; ++j) out(t, j) = rng.uniform();
        return;
    }
    if (theta > 0.0) {
        // Gamma(1/theta) frailty: u_j = (1 + E_j/V)^{-1/theta}.
        for (int t = 0; t < n; ++t) {
            const double v = rng.gamma(1.0 / theta);
            for (int j = 0; j < d; ++j)
                out(t, j) = std::exp(-std::log1p(rng.exponential() / v) / theta);
        }
        return;
    }
    if (d != 2)
        throw std::invalid_argument("clayton: negative theta is only defined for d = 2");
    // Conditional inversion handles the countermonotone-leaning range.
    for (int t = 0; t < n; ++t) {
        const double u = rng.uniform(), q = rng.uniform();
        const double a = std::exp(-theta / (1.0 + theta) * std::log(q)) - 1.0;
        const double vpow = a * std::exp(-theta * std::log(u)) + 1.0;
        out(t, 0) = u;
        out(t, 1) = std::exp(-std::log(vpow) / theta);
    }
}

// ---------------------------------------------------------------------------
// Gumbel
// ---------------------------------------------------------------------------

inline double gumbel_log_density(const Eigen::VectorXd& u, double theta) {
    const int d = static_cast<int>(u.size());
    if (theta < 1.0) throw std::invalid_argument("gumbel theta must be >= 1");
    if (theta < 1.0 + 1e-10) return 0.0;
    const double a = 1.0 / theta;
    double sum_neglog = 0.0;   // Sum (-log u_j) = Sum t_j^a
    double sum_log_t = 0.0;    // Sum log t_j, t_j = (-log u_j)^theta
    double tstar = 0.0;        // Sum t_j
    for (int j = 0; j < d; ++j) {
        const double nl = -std::log(u[j]);
        sum_neglog += nl;
        sum_log_t += theta * std::log(nl);
        tstar += std::pow(nl, theta);
    }
    const double log_tstar = std::log(tstar);
    const double tstar_a = std::exp(a * log_tstar);
    const auto poly = arch_detail::gumbel_deriv_poly(d, a);
    return -tstar_a + sum_neglog + d * (a - 1.0) * log_tstar - (a - 1.0) * sum_log_t -
           d * std::log(a) + arch_detail::log_poly(poly, -a * log_tstar);
}

inline double gumbel_cdf(const Eigen::VectorXd& u, double theta) {
    if (theta < 1.0) throw std::invalid_argument("gumbel theta must be >= 1");
    double tstar = 0.0;
    for (int j = 0; j < static_cast<int>(u.size()); ++j)
        tstar += std::pow(-std::log(u[j]), theta);
    return std::exp(-std::pow(tstar, 1.0 / theta));
}

inline void sample_gumbel(double theta, int d, int n, Rng& rng, Eigen::MatrixXd& out) {
    out.resize(n, d);
    if (theta < 1.0 + 1e-9) {
        for (int t = 0; t < n; ++t)
            for (int j = 0; j < d; ++j) out(t, j) = rng.uniform();
        return;
    }
    const double a = 1.0 / theta;
    // Positive-stable frailty: u_j = exp(-(E_j/V)^{1/theta}).
    for (int t = 0; t < n; ++t) {
        const double v = rng.positive_stable(a);
        for (int j = 0; j < d; ++j)
            out(t, j) = std::exp(-std::pow(rng.exponential() / v, a));
    }
}

// ---------------------------------------------------------------------------
// Frank
// ---------------------------------------------------------------------------

namespace arch_detail {
/// Frank density for theta > 0 through the generator-derivative polynomial:
/// c(u) = theta^{d-1} Q_{d-1}(y*) / prod_j y_j with y_j = expm1(theta u_j)
/// and y* = x*/(1-x*), x* = prod x_j / p^{d-1}, x_j = -expm1(-theta u_j).
inline double frank_log_density_pos(const Eigen::VectorXd& u, double theta) {
    const int d = static_cast<int>(u.size());
    const double log_p = std::log(-std::expm1(-theta));
    double log_xstar = -(d - 1.0) * log_p;
    double sum_log_y = 0.0;
    for (int j = 0; j < d; ++j) {
        log_xstar += std::log(-std::expm1(-theta * u[j]));
        sum_log_y += std::log(std::expm1(theta * u[j]));
    }
    // y* from x*; x* <= p < 1 always, so log1p(-x*) is safe.
    const double xstar = std::exp(log_xstar);
    const double log_ystar = log_xstar - std::log1p(-std::min(xstar, 1.0 - 1e-16));
    const auto poly = frank_deriv_poly(d);
    return (d - 1.0) * std::log(theta) + log_poly(poly, log_ystar) - sum_log_y;
}
}  // namespace arch_detail

inline double frank_log_density(const Eigen::VectorXd& u, double theta) {
    if (std::abs(theta) < 1e-10) return 0.0;
    if (theta > 0.0) return arch_detail::frank_log_density_pos(u, theta);
    if (u.size() != 2)
        throw std::invalid_argument("frank: negative theta is only defined for d = 2");
    Eigen::VectorXd r(2);
    r << 1.0 - u[0], u[1];  // 90-degree rotation maps theta to -theta
    return arch_detail::frank_log_density_pos(r, -theta);
}

inline double frank_cdf(const Eigen::VectorXd& u, double theta) {
    const int d = static_cast<int>(u.size());
    if (std::abs(theta) < 1e-10) {
        double p = 1.0;
        for (int j = 0; j < d; ++j) p *= u[j];
        return p;
    }
    if (theta > 0.0) {
        const double log_p = std::log(-std::expm1(-theta));
        double log_xstar = -(d - 1.0) * log_p;
        for (int j = 0; j < d; ++j) log_xstar += std::log(-std::expm1(-theta * u[j]));
        return -std::log1p(-std::exp(log_xstar)) / theta;
    }
    if (d != 2) throw std::invalid_argument("frank: negative theta is only defined for d = 2");
    Eigen::VectorXd r(2);
    r << 1.0 - u[0], u[1];
    return u[1] - frank_cdf(r, -theta);
}

inline void sample_frank(double theta, int d, int n, Rng& rng, Eigen::MatrixXd& out) {
    out.resize(n, d);
    if (std::abs(theta) < 1e-8) {
        for (int t = 0; t < n; ++t)
            for (int j = 0; j < d; ++j) out(t, j) = rng.uniform();
        return;
    }
    if (theta < 0.0) {
        if (d != 2)
            throw std::invalid_argument("frank: negative theta is only defined for d = 2");
        sample_frank(-theta, d, n, rng, out);
        for (int t = 0; t < n; ++t) out(t, 0) = 1.0 - out(t, 0);
        return;
    }
    // Logarithmic-series frailty: u_j = psi(E_j/V).
    const double p = -std::expm1(-theta);
    for (int t = 0; t < n; ++t) {
        const double v = static_cast<double>(rng.log_series(p));
        for (int j = 0; j < d; ++j) {
            const double e = rng.exponential();
            const double x = p * std::exp(-e / v);
            out(t, j) = std::clamp(-std::log1p(-x) / theta, 1e-15, 1.0 - 1e-15);
        }
    }
}

}  // namespace codep
