#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "codep/copula_params.hpp"
#include "codep/interp.hpp"
#include "codep/quadrature.hpp"
#include "codep/rng.hpp"
#include "codep/special.hpp"

namespace codep {

// ---------------------------------------------------------------------------
// Gaussian copula
// ---------------------------------------------------------------------------

/// Density evaluator with the Cholesky factor cached; z are normal scores.
class GaussianCopulaDensity {
public:
    explicit GaussianCopulaDensity(const Eigen::MatrixXd& R) : d_(static_cast<int>(R.rows())) {
        Eigen::LLT<Eigen::MatrixXd> llt(R);
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("gaussian copula: correlation not positive definite");
        L_ = llt.matrixL();
        log_det_ = 0.0;
        for (int i = 0; i < d_; ++i) log_det_ += 2.0 * std::log(L_(i, i));
    }

    double log_density_z(const Eigen::VectorXd& z) const {
        const Eigen::VectorXd w = L_.triangularView<Eigen::Lower>().solve(z);
        return -0.5 * log_det_ - 0.5 * (w.squaredNorm() - z.squaredNorm());
    }

    const Eigen::MatrixXd& chol() const { return L_; }
    int dim() const { return d_; }

private:
    int d_;
    Eigen::MatrixXd L_;
    double log_det_ = 0.0;
};

/// Bivariate Gaussian copula CDF via the conditional single integral
/// C(u,v) = int_0^u Phi((k - rho*Phi^{-1}(s))/sqrt(1-rho^2)) ds.
inline double gaussian_copula_cdf2(double u, double v, double rho) {
    if (u <= 0.0 || v <= 0.0) return 0.0;
    if (u >= 1.0) return v;
    if (v >= 1.0) return u;
    if (rho >= 1.0 - 1e-12) return std::min(u, v);
    if (rho <= -1.0 + 1e-12) return std::max(u + v - 1.0, 0.0);
    const double k = norm_quantile(v);
    const double denom = std::sqrt(1.0 - rho * rho);
    return integrate_1d_adaptive(
        [&](double s) { return norm_cdf((k - rho * norm_quantile(s)) / denom); }, 0.0, u, 1e-10);
}

inline void sample_gaussian_copula(const Eigen::MatrixXd& R, int n, Rng& rng,
                                   Eigen::MatrixXd& out) {
    const GaussianCopulaDensity dens(R);
    const int d = dens.dim();
    out.resize(n, d);
    Eigen::VectorXd eps(d);
    for (int t = 0; t < n; ++t) {
        for (int j = 0; j < d; ++j) eps[j] = rng.normal();
        const Eigen::VectorXd z = dens.chol() * eps;
        for (int j = 0; j < d; ++j) out(t, j) = norm_cdf(z[j]);
    }
}

// ---------------------------------------------------------------------------
// Student-t copula
// ---------------------------------------------------------------------------

class StudentTCopulaDensity {
public:
    StudentTCopulaDensity(const Eigen::MatrixXd& R, double nu)
        : d_(static_cast<int>(R.rows())), nu_(nu) {
        if (!(nu > 0.0)) throw std::invalid_argument("t copula: nu must be positive");
        Eigen::LLT<Eigen::MatrixXd> llt(R);
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("t copula: correlation not positive definite");
        L_ = llt.matrixL();
        log_det_ = 0.0;
        for (int i = 0; i < d_; ++i) log_det_ += 2.0 * std::log(L_(i, i));
        joint_const_ = log_gamma(0.5 * (nu_ + d_)) - log_gamma(0.5 * nu_) -
                       0.5 * d_ * std::log(nu_ * pi_v) - 0.5 * log_det_;
        margin_const_ = log_gamma(0.5 * (nu_ + 1.0)) - log_gamma(0.5 * nu_) -
                        0.5 * std::log(nu_ * pi_v);
    }

    /// z are t_nu scores, z_j = T_nu^{-1}(u_j).
    double log_density_z(const Eigen::VectorXd& z) const {
        const Eigen::VectorXd w = L_.triangularView<Eigen::Lower>().solve(z);
        double ll = joint_const_ - 0.5 * (nu_ + d_) * std::log1p(w.squaredNorm() / nu_);
        for (int j = 0; j < d_; ++j)
            ll -= margin_const_ - 0.5 * (nu_ + 1.0) * std::log1p(z[j] * z[j] / nu_);
        return ll;
    }

    const Eigen::MatrixXd& chol() const { return L_; }
    double nu() const { return nu_; }
    int dim() const { return d_; }

private:
    int d_;
    double nu_;
    Eigen::MatrixXd L_;
    double log_det_ = 0.0, joint_const_ = 0.0, margin_const_ = 0.0;
};

/// Bivariate t copula CDF; conditional-t single integral in probability space.
inline double t_copula_cdf2(double u, double v, double rho, double nu) {
    if (u <= 0.0 || v <= 0.0) return 0.0;
    if (u >= 1.0) return v;
    if (v >= 1.0) return u;
    if (rho >= 1.0 - 1e-12) return std::min(u, v);
    if (rho <= -1.0 + 1e-12) return std::max(u + v - 1.0, 0.0);
    const double k = t_quantile(v, nu);
    const double c1 = 1.0 - rho * rho;
    return integrate_1d_adaptive(
        [&](double s) {
            const double x = t_quantile(s, nu);
            const double scale = std::sqrt((nu + x * x) * c1 / (nu + 1.0));
            return t_cdf((k - rho * x) / scale, nu + 1.0);
        },
        0.0, u, 1e-9);
}

inline void sample_t_copula(const Eigen::MatrixXd& R, double nu, int n, Rng& rng,
                            Eigen::MatrixXd& out) {
    const StudentTCopulaDensity dens(R, nu);
    const int d = dens.dim();
    out.resize(n, d);
    Eigen::VectorXd eps(d);
    for (int t = 0; t < n; ++t) {
        for (int j = 0; j < d; ++j) eps[j] = rng.normal();
        const double chi2 = 2.0 * rng.gamma(0.5 * nu);  // chi-square_nu
        const Eigen::VectorXd z = (dens.chol() * eps) / std::sqrt(chi2 / nu);
        for (int j = 0; j < d; ++j) out(t, j) = t_cdf(z[j], nu);
    }
}

// ---------------------------------------------------------------------------
// Skew-t copula (multivariate skew-t with correlation matrix R, shape vector
// alpha -- exposed to callers as "delta" -- and nu degrees of freedom; the
// copula transforms through the exact univariate margins of that joint law).
// ---------------------------------------------------------------------------

/// Univariate skew-t log-density, shape alpha, nu degrees of freedom:
/// f(x) = 2 t(x; nu) T(alpha x sqrt((nu+1)/(nu+x^2)); nu+1).
inline double skewt1_log_pdf(double x, double alpha, double nu) {
    const double w = alpha * x * std::sqrt((nu + 1.0) / (nu + x * x));
    return std::log(2.0) + t_log_pdf(x, nu) + std::log(t_cdf(w, nu + 1.0));
}

/// Shape parameter of margin j of the multivariate skew-t with correlation R
/// and shape vector alpha (the standard marginalization formula).
inline double skewt_marginal_shape(const Eigen::MatrixXd& R, const Eigen::VectorXd& alpha,
                                   int j) {
    const int d = static_cast<int>(R.rows());
    if (d == 1) return alpha[0];
    Eigen::VectorXd r(d - 1), a2(d - 1);
    Eigen::MatrixXd O22(d - 1, d - 1);
    int ri = 0;
    for (int i = 0; i < d; ++i) {
        if (i == j) continue;
        r[ri] = R(i, j);
        a2[ri] = alpha[i];
        int ci = 0;
        for (int c = 0; c < d; ++c) {
            if (c == j) continue;
            O22(ri, ci++) = R(i, c);
        }
        ++ri;
    }
    const Eigen::MatrixXd sc = O22 - r * r.transpose();  // Omega_{22.1}
    const double denom = 1.0 + a2.dot(sc * a2);
    return (alpha[j] + r.dot(a2)) / std::sqrt(std::max(denom, 1e-12));
}

/// Univariate skew-t margin with CDF and quantile obtained by numerically
/// integrating the density in the probability space of the plain t_nu
/// distribution and caching the result on a graded grid. Inversion uses a
/// monotone cubic through the cached nodes; accuracy is limited by the grid,
/// which the cells parameter controls.
class SkewTMargin {
public:
    SkewTMargin() = default;

    SkewTMargin(double alpha, double nu, int cells = 200) : alpha_(alpha), nu_(nu) {
        // Logistic-spaced grid in w = T_nu(x): geometric resolution at both
        // tails, finite x at every node.
        const int n = cells + 1;
        std::vector<double> w(n), x(n), F(n);
        const double smax = 27.0;
        for (int i = 0; i < n; ++i) {
            const double s = -smax + 2.0 * smax * i / (cells);
            w[i] = 1.0 / (1.0 + std::exp(-s));
            x[i] = t_quantile(w[i], nu_);
        }
        // g(w) = f_skewt(x(w)) / t(x(w)) has finite limits at w -> {0,1}.
        auto g = [&](double wv) {
            const double xv = t_quantile(wv, nu_);
            return 2.0 * t_cdf(alpha_ * xv * std::sqrt((nu_ + 1.0) / (nu_ + xv * xv)), nu_ + 1.0);
        };
        const double g0 = 2.0 * t_cdf(-alpha_ * std::sqrt(nu_ + 1.0), nu_ + 1.0);
        F[0] = g0 * w[0];
        std::vector<double> qx, qw;
        for (int i = 1; i < n; ++i) {
            gl_on_interval(8, w[i - 1], w[i], qx, qw);
            double cell = 0.0;
            for (std::size_t k = 0; k < qx.size(); ++k) cell += qw[k] * g(qx[k]);
            F[i] = F[i - 1] + cell;
        }
        const double g1 = 2.0 * t_cdf(alpha_ * std::sqrt(nu_ + 1.0), nu_ + 1.0);
        const double total = F[n - 1] + g1 * (1.0 - w[n - 1]);
        for (double& f : F) f /= total;
        for (int i = 1; i < n; ++i)
            if (F[i] <= F[i - 1]) F[i] = F[i - 1] + 1e-300;  // guards exact ties in the far tails
        cdf_ = MonotoneCubic(x, F);
        quant_ = MonotoneCubic(F, x);
        u_lo_ = F.front();
        u_hi_ = F.back();
    }

    double log_pdf(double x) const { return skewt1_log_pdf(x, alpha_, nu_); }

    double cdf(double x) const { return cdf_(x); }

    double quantile(double u) const { return quant_(std::clamp(u, u_lo_, u_hi_)); }

    double shape() const { return alpha_; }

private:
    double alpha_ = 0.0, nu_ = 5.0;
    MonotoneCubic cdf_, quant_;
    double u_lo_ = 0.0, u_hi_ = 1.0;
};

/// Full skew-t copula evaluator: multivariate skew-t density over the product
/// of its exact univariate margins, margins inverted numerically.
class SkewTCopula {
public:
    SkewTCopula(const Eigen::MatrixXd& R, const Eigen::VectorXd& alpha, double nu,
                int margin_cells = 200)
        : d_(static_cast<int>(R.rows())), nu_(nu), alpha_(alpha), R_(R) {
        if (alpha.size() != d_) throw std::invalid_argument("skew-t copula: alpha size mismatch");
        if (!(nu > 0.0)) throw std::invalid_argument("skew-t copula: nu must be positive");
        Eigen::LLT<Eigen::MatrixXd> llt(R);
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("skew-t copula: correlation not positive definite");
        L_ = llt.matrixL();
        log_det_ = 0.0;
        for (int i = 0; i < d_; ++i) log_det_ += 2.0 * std::log(L_(i, i));
        joint_const_ = std::log(2.0) + log_gamma(0.5 * (nu_ + d_)) - log_gamma(0.5 * nu_) -
                       0.5 * d_ * std::log(nu_ * pi_v) - 0.5 * log_det_;
        margins_.reserve(d_);
        for (int j = 0; j < d_; ++j)
            margins_.emplace_back(skewt_marginal_shape(R, alpha, j), nu_, margin_cells);
    }

    int dim() const { return d_; }
    const SkewTMargin& margin(int j) const { return margins_[j]; }

    /// log density of the multivariate skew-t at z.
    double joint_log_pdf(const Eigen::VectorXd& z) const {
        const Eigen::VectorXd w = L_.triangularView<Eigen::Lower>().solve(z);
        const double q = w.squaredNorm();
        const double tail = alpha_.dot(z) * std::sqrt((nu_ + d_) / (nu_ + q));
        return joint_const_ - 0.5 * (nu_ + d_) * std::log1p(q / nu_) +
               std::log(t_cdf(tail, nu_ + d_));
    }

    double log_density(const Eigen::VectorXd& u) const {
        Eigen::VectorXd z(d_);
        for (int j = 0; j < d_; ++j) z[j] = margins_[j].quantile(u[j]);
        double ll = joint_log_pdf(z);
        for (int j = 0; j < d_; ++j) ll -= margins_[j].log_pdf(z[j]);
        return ll;
    }

    /// Bivariate CDF by tensor quadrature over the lower-orthant rectangle in
    /// t_nu probability space, panels graded toward all edges. The doubling
    /// pass bounds the quadrature error.
    double cdf2(double u, double v) const {
        if (d_ != 2) throw std::logic_error("cdf2 requires a bivariate copula");
        if (u <= 0.0 || v <= 0.0) return 0.0;
        if (u >= 1.0 && v >= 1.0) return 1.0;
        const double s1 = u >= 1.0 ? 1.0 : t_cdf(margins_[0].quantile(u), nu_);
        const double s2 = v >= 1.0 ? 1.0 : t_cdf(margins_[1].quantile(v), nu_);
        const double coarse = orthant_mass(s1, s2, 12);
        const double fine = orthant_mass(s1, s2, 24);
        (void)coarse;
        return std::clamp(fine, 0.0, 1.0);
    }

    void sample(int n, Rng& rng, Eigen::MatrixXd& out) const {
        // Hidden-truncation representation: (X0, X) jointly normal with
        // cov [[1, dvec'],[dvec, R]]; Y = sign(X0) X; Z = Y / sqrt(V/nu).
        const double denom = std::sqrt(1.0 + alpha_.dot(R_ * alpha_));
        const Eigen::VectorXd dvec = (R_ * alpha_) / denom;
        Eigen::MatrixXd big(d_ + 1, d_ + 1);
        big(0, 0) = 1.0;
        big.block(0, 1, 1, d_) = dvec.transpose();
        big.block(1, 0, d_, 1) = dvec;
        big.block(1, 1, d_, d_) = R_;
        Eigen::LLT<Eigen::MatrixXd> llt(big);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("skew-t sampler: augmented covariance not PD");
        const Eigen::MatrixXd Lb = llt.matrixL();
        out.resize(n, d_);
        Eigen::VectorXd eps(d_ + 1);
        for (int t = 0; t < n; ++t) {
            for (int j = 0; j <= d_; ++j) eps[j] = rng.normal();
            Eigen::VectorXd zfull = Lb * eps;
            const double sign = zfull[0] > 0.0 ? 1.0 : -1.0;
            const double chi2 = 2.0 * rng.gamma(0.5 * nu_);
            const double scale = std::sqrt(chi2 / nu_);
            for (int j = 0; j < d_; ++j)
                out(t, j) = margins_[j].cdf(sign * zfull[j + 1] / scale);
        }
    }

private:
    /// Integral of the joint density over {T_nu(x) <= s1} x {T_nu(y) <= s2},
    /// computed in probability space so the heavy tails are mapped exactly.
    double orthant_mass(double s1, double s2, int nodes_per_panel) const {
        static const double fracs[] = {0.0,  1e-7, 1e-5, 1e-3, 1e-2, 0.1,
                                       0.35, 0.65, 0.9,  0.99, 0.999, 1.0};
        const int np = sizeof(fracs) / sizeof(fracs[0]) - 1;
        std::vector<double> x1, w1, x2, w2;
        double total = 0.0;
        for (int a = 0; a < np; ++a) {
            gl_on_interval(nodes_per_panel, s1 * fracs[a], s1 * fracs[a + 1], x1, w1);
            std::vector<double> q1(x1.size());
            for (std::size_t i = 0; i < x1.size(); ++i) q1[i] = t_quantile(x1[i], nu_);
            for (int b = 0; b < np; ++b) {
                gl_on_interval(nodes_per_panel, s2 * fracs[b], s2 * fracs[b + 1], x2, w2);
                std::vector<double> q2(x2.size()), lt2(x2.size());
                for (std::size_t j = 0; j < x2.size(); ++j) {
                    q2[j] = t_quantile(x2[j], nu_);
                    lt2[j] = t_log_pdf(q2[j], nu_);
                }
                Eigen::VectorXd z(2);
                for (std::size_t i = 0; i < x1.size(); ++i) {
                    const double lt1 = t_log_pdf(q1[i], nu_);
                    for (std::size_t j = 0; j < x2.size(); ++j) {
                        z << q1[i], q2[j];
                        total += w1[i] * w2[j] * std::exp(joint_log_pdf(z) - lt1 - lt2[j]);
                    }
                }
            }
        }
        return total;
    }

    int d_;
    double nu_;
    Eigen::VectorXd alpha_;
    Eigen::MatrixXd R_, L_;
    double log_det_ = 0.0, joint_const_ = 0.0;
    std::vector<SkewTMargin> margins_;
};

}  // namespace codep
