#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace codep {

enum class CopulaFamily { Gaussian, StudentT, SkewT, Clayton, Gumbel, Frank };

inline const char* to_string(CopulaFamily f) {
    switch (f) {
        case CopulaFamily::Gaussian: return "gaussian";
        case CopulaFamily::StudentT: return "student_t";
        case CopulaFamily::SkewT: return "skew_t";
        case CopulaFamily::Clayton: return "clayton";
        case CopulaFamily::Gumbel: return "gumbel";
        case CopulaFamily::Frank: return "frank";
    }
    return "?";
}

inline CopulaFamily copula_family_from_string(const std::string& s) {
    if (s == "gaussian") return CopulaFamily::Gaussian;
    if (s == "student_t") return CopulaFamily::StudentT;
    if (s == "skew_t") return CopulaFamily::SkewT;
    if (s == "clayton") return CopulaFamily::Clayton;
    if (s == "gumbel") return CopulaFamily::Gumbel;
    if (s == "frank") return CopulaFamily::Frank;
    throw std::invalid_argument("unknown copula family: " + s);
}

inline bool is_elliptical(CopulaFamily f) {
    return f == CopulaFamily::Gaussian || f == CopulaFamily::StudentT || f == CopulaFamily::SkewT;
}
inline bool is_archimedean(CopulaFamily f) { return !is_elliptical(f); }

/// Parameter bundle; only the fields relevant to the family are read.
/// corr: correlation matrix (elliptical families); nu: degrees of freedom
/// (t and skew-t); delta: shape vector (skew-t); theta: scalar (Archimedean).
struct CopulaParams {
    Eigen::MatrixXd corr;
    double nu = 5.0;
    Eigen::VectorXd delta;
    double theta = 1.0;

    static CopulaParams elliptical2(double rho, double nu = 5.0) {
        CopulaParams p;
        p.corr.resize(2, 2);
        p.corr << 1.0, rho, rho, 1.0;
        p.nu = nu;
        p.delta = Eigen::VectorXd::Zero(2);
        return p;
    }

    static CopulaParams archimedean(double theta) {
        CopulaParams p;
        p.theta = theta;
        return p;
    }

    double rho() const { return corr(0, 1); }

    void validate(CopulaFamily family, int d) const {
        if (d < 2) throw std::invalid_argument("copula dimension must be >= 2");
        if (is_elliptical(family)) {
            if (corr.rows() != d || corr.cols() != d)
                throw std::invalid_argument("correlation matrix has wrong dimension");
            for (int i = 0; i < d; ++i) {
                if (std::abs(corr(i, i) - 1.0) > 1e-12)
                    throw std::invalid_argument("correlation matrix must have unit diagonal");
                for (int j = 0; j < i; ++j) {
                    if (std::abs(corr(i, j) - corr(j, i)) > 1e-12)
                        throw std::invalid_argument("correlation matrix must be symmetric");
                    if (!(std::abs(corr(i, j)) <= 1.0))
                        throw std::invalid_argument("correlations must lie in [-1,1]");
                }
            }
            Eigen::LLT<Eigen::MatrixXd> llt(corr);
            if (llt.info() != Eigen::Success)
                throw std::invalid_argument("correlation matrix is not positive definite");
            if (family != CopulaFamily::Gaussian && !(nu > 0.0))
                throw std::invalid_argument("copula nu must be positive");
            if (family == CopulaFamily::SkewT && delta.size() != d)
                throw std::invalid_argument("skew-t delta must have one entry per margin");
        } else {
            switch (family) {
                case CopulaFamily::Clayton:
                    if (d == 2) {
                        if (!(theta >= -1.0) || theta == 0.0)
                            throw std::invalid_argument("clayton theta must be in [-1,inf)\\{0}");
                    } else if (!(theta > 0.0)) {
                        throw std::invalid_argument("clayton theta must be positive for d > 2");
                    }
                    break;
                case CopulaFamily::Gumbel:
                    if (!(theta >= 1.0)) throw std::invalid_argument("gumbel theta must be >= 1");
                    break;
                case CopulaFamily::Frank:
                    if (d == 2) {
                        if (theta == 0.0) throw std::invalid_argument("frank theta must be nonzero");
                    } else if (!(theta > 0.0)) {
                        throw std::invalid_argument("frank theta must be positive for d > 2");
                    }
                    break;
                default:
                    break;
            }
        }
    }
};

/// Canonical partial-correlation chart: maps unconstrained reals (one per
/// strictly-lower-triangle entry) to a positive definite correlation matrix
/// by filling a Cholesky factor row by row with tanh-bounded direction
/// cosines. Bijective onto the PD correlation matrices.
struct CorrelationChart {
    int d;

    int n_free() const { return d * (d - 1) / 2; }

    Eigen::MatrixXd to_matrix(const Eigen::VectorXd& x) const {
        Eigen::MatrixXd L = Eigen::MatrixXd::Zero(d, d);
        L(0, 0) = 1.0;
        int k = 0;
        for (int i = 1; i < d; ++i) {
            double rem = 1.0;
            for (int j = 0; j < i; ++j) {
                const double z = std::tanh(x[k++]);
                L(i, j) = z * std::sqrt(rem);
                rem -= L(i, j) * L(i, j);
                if (rem < 1e-14) rem = 1e-14;
            }
            L(i, i) = std::sqrt(rem);
        }
        Eigen::MatrixXd R = L * L.transpose();
        for (int i = 0; i < d; ++i) R(i, i) = 1.0;
        return R;
    }

    Eigen::VectorXd from_matrix(const Eigen::MatrixXd& R) const {
        Eigen::LLT<Eigen::MatrixXd> llt(R);
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("cannot chart a non-PD correlation matrix");
        const Eigen::MatrixXd L = llt.matrixL();
        Eigen::VectorXd x(n_free());
        int k = 0;
        for (int i = 1; i < d; ++i) {
            double rem = 1.0;
            for (int j = 0; j < i; ++j) {
                const double z = std::clamp(L(i, j) / std::sqrt(rem), -1.0 + 1e-12, 1.0 - 1e-12);
                x[k++] = std::atanh(z);
                rem -= L(i, j) * L(i, j);
                if (rem < 1e-14) rem = 1e-14;
            }
        }
        return x;
    }
};

/// Shrinks a (possibly indefinite) sample correlation toward the identity
/// until Cholesky succeeds; used only to seed optimizers.
inline Eigen::MatrixXd nearest_pd_correlation(Eigen::MatrixXd R) {
    const int d = static_cast<int>(R.rows());
    for (int i = 0; i < d; ++i) {
        R(i, i) = 1.0;
        for (int j = 0; j < i; ++j) {
            const double v = std::clamp(0.5 * (R(i, j) + R(j, i)), -0.999, 0.999);
            R(i, j) = R(j, i) = v;
        }
    }
    for (double w = 1.0; w > 1e-4; w *= 0.9) {
        Eigen::MatrixXd cand = w * R + (1.0 - w) * Eigen::MatrixXd::Identity(d, d);
        for (int i = 0; i < d; ++i) cand(i, i) = 1.0;
        if (Eigen::LLT<Eigen::MatrixXd>(cand).info() == Eigen::Success) return cand;
    }
    return Eigen::MatrixXd::Identity(d, d);
}

}  // namespace codep
