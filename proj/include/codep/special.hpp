#pragma once

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <stdexcept>

namespace codep {

inline constexpr double pi_v = 3.14159265358979323846;

inline double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi_v); }
inline double norm_log_pdf(double x) { return -0.5 * x * x - 0.5 * std::log(2.0 * pi_v); }

inline double norm_cdf(double x) {
    static const boost::math::normal_distribution<double> d;
    return boost::math::cdf(d, x);
}

inline double norm_quantile(double u) {
    static const boost::math::normal_distribution<double> d;
    return boost::math::quantile(d, u);
}

/// Student-t density with nu degrees of freedom (unstandardized).
inline double t_log_pdf(double x, double nu) {
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * pi_v) -
           0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

inline double t_pdf(double x, double nu) { return std::exp(t_log_pdf(x, nu)); }

inline double t_cdf(double x, double nu) {
    boost::math::students_t_distribution<double> d(nu);
    return boost::math::cdf(d, x);
}

inline double t_quantile(double u, double nu) {
    boost::math::students_t_distribution<double> d(nu);
    return boost::math::quantile(d, u);
}

/// Upper-tail chi-square p-value via the regularized incomplete gamma.
inline double chi2_upper_tail(double stat, double df) {
    if (stat < 0.0) throw std::invalid_argument("chi-square statistic must be >= 0");
    return boost::math::gamma_q(0.5 * df, 0.5 * stat);
}

/// log Gamma(x), forwarding to std for clarity at call sites.
inline double log_gamma(double x) { return std::lgamma(x); }

}  // namespace codep
