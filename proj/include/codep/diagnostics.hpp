#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "codep/special.hpp"

namespace codep {

struct TestResult {
    std::string test_name;
    double statistic = 0.0;
    double p_value = 1.0;
    int lag_or_df = 1;
};

struct DescriptiveStats {
    double mean = 0.0, sd = 0.0, max = 0.0, min = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;  // raw Pearson m4/m2^2, not excess
};

namespace detail {
inline void require_nonconstant(const std::vector<double>& x, const char* who) {
    const double first = x.empty() ? 0.0 : x[0];
    for (double v : x)
        if (v != first) return;
    throw std::invalid_argument(std::string(who) + ": constant input");
}
}  // namespace detail

/// Moment-based summary. Skewness is m3/m2^{3/2} and kurtosis the raw Pearson
/// m4/m2^2 (so a normal sample sits near 3, not 0); sd uses the n-1 divisor.
inline DescriptiveStats descriptive_stats(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n < 4) throw std::invalid_argument("descriptive_stats: need length >= 4");
    detail::require_nonconstant(x, "descriptive_stats");
    DescriptiveStats s;
    s.mean = 0.0;
    for (double v : x) s.mean += v;
    s.mean /= n;
    s.min = *std::min_element(x.begin(), x.end());
    s.max = *std::max_element(x.begin(), x.end());
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    s.sd = std::sqrt(m2 * n / (n - 1.0));
    s.skewness = m3 / std::pow(m2, 1.5);
    s.kurtosis = m4 / (m2 * m2);
    return s;
}

/// Sample autocorrelations rho_k, k = 1..max_lag, denominator Sum (x-xbar)^2.
inline std::vector<double> acf(const std::vector<double>& x, int max_lag) {
    const int n = static_cast<int>(x.size());
    if (max_lag < 1 || max_lag >= n / 2)
        throw std::invalid_argument("acf: require 1 <= max_lag < n/2");
    detail::require_nonconstant(x, "acf");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double denom = 0.0;
    for (double v : x) denom += (v - mean) * (v - mean);
    std::vector<double> rho(max_lag);
    for (int k = 1; k <= max_lag; ++k) {
        double num = 0.0;
        for (int t = 0; t + k < n; ++t) num += (x[t] - mean) * (x[t + k] - mean);
        rho[k - 1] = num / denom;
    }
    return rho;
}

/// Ljung-Box Q = n(n+2) Sum rho_k^2/(n-k); upper-tail chi-square(m) p-value.
inline TestResult ljung_box(const std::vector<double>& x, int m) {
    const int n = static_cast<int>(x.size());
    const auto rho = acf(x, m);
    double q = 0.0;
    for (int k = 1; k <= m; ++k) q += rho[k - 1] * rho[k - 1] / (n - k);
    q *= n * (n + 2.0);
    return {"ljung_box", q, chi2_upper_tail(q, m), m};
}

/// Engle's ARCH LM test: regress x_t^2 on an intercept and m of its own lags;
/// the statistic is n_eff * R^2 against chi-square(m).
inline TestResult arch_lm_test(const std::vector<double>& x, int m) {
    const int n = static_cast<int>(x.size());
    if (m < 1 || m >= n / 2) throw std::invalid_argument("arch_lm_test: require 1 <= m < n/2");
    std::vector<double> sq(n);
    for (int t = 0; t < n; ++t) sq[t] = x[t] * x[t];
    detail::require_nonconstant(sq, "arch_lm_test");

    const int rows = n - m;
    Eigen::MatrixXd X(rows, m + 1);
    Eigen::VectorXd y(rows);
    for (int t = 0; t < rows; ++t) {
        X(t, 0) = 1.0;
        for (int k = 1; k <= m; ++k) X(t, k) = sq[t + m - k];
        y[t] = sq[t + m];
    }
    const Eigen::VectorXd beta = (X.transpose() * X).ldlt().solve(X.transpose() * y);
    if (!beta.allFinite()) throw std::runtime_error("arch_lm_test: singular regression matrix");
    const double ybar = y.mean();
    const double sst = (y.array() - ybar).square().sum();
    if (sst <= 0.0) throw std::runtime_error("arch_lm_test: degenerate regression");
    const double ssr = (y - X * beta).squaredNorm();
    const double r2 = 1.0 - ssr / sst;
    const double stat = rows * std::max(0.0, r2);
    return {"arch_lm", stat, chi2_upper_tail(stat, m), m};
}

/// Hill tail-index estimate from the k upper order statistics of x
/// (ascending order statistics y_(.), spacing sum over i = 1..k-1, 1/k
/// normalisation). The caller chooses the tail transform, e.g. |returns|.
inline double hill_estimator(const std::vector<double>& x, int k) {
    const int n = static_cast<int>(x.size());
    if (k < 2 || k >= n) throw std::invalid_argument("hill_estimator: require 2 <= k < n");
    std::vector<double> sorted(x);
    std::sort(sorted.begin(), sorted.end());
    const double floor_stat = sorted[n - k];  // y_(T-k) with 1-based order statistics
    if (!(floor_stat > 0.0))
        throw std::invalid_argument("hill_estimator: nonpositive value in the used tail");
    double acc = 0.0;
    for (int i = 1; i <= k - 1; ++i) acc += std::log(sorted[n - i]) - std::log(floor_stat);
    acc /= k;
    if (acc <= 0.0) throw std::runtime_error("hill_estimator: zero log-spacing (estimate overflows)");
    return 1.0 / acc;
}

/// Hill estimates over a grid of k values, for tail-stability plots.
inline std::vector<std::pair<int, double>> hill_curve(const std::vector<double>& x,
                                                      const std::vector<int>& k_grid) {
    std::vector<std::pair<int, double>> out;
    for (int k : k_grid) out.emplace_back(k, hill_estimator(x, k));
    return out;
}

/// Normal qq data: (mu + sd * Phi^{-1}((i-0.5)/n), x_(i)).
inline std::vector<std::pair<double, double>> qq_points(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    if (n < 10) throw std::invalid_argument("qq_points: need n >= 10");
    detail::require_nonconstant(x, "qq_points");
    const DescriptiveStats s = descriptive_stats(x);
    std::vector<double> sorted(x);
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, double>> pts(n);
    for (int i = 1; i <= n; ++i)
        pts[i - 1] = {s.mean + s.sd * norm_quantile((i - 0.5) / n), sorted[i - 1]};
    return pts;
}

}  // namespace codep
