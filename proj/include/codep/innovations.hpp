#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "codep/rng.hpp"
#include "codep/special.hpp"

namespace codep {

enum class InnovationFamily { Gaussian, SkewGaussian, StudentT, SkewT };

inline const char* to_string(InnovationFamily f) {
    switch (f) {
        case InnovationFamily::Gaussian: return "gaussian";
        case InnovationFamily::SkewGaussian: return "skew_gaussian";
        case InnovationFamily::StudentT: return "student_t";
        case InnovationFamily::SkewT: return "skew_t";
    }
    return "?";
}

inline InnovationFamily innovation_family_from_string(const std::string& s) {
    if (s == "gaussian") return InnovationFamily::Gaussian;
    if (s == "skew_gaussian") return InnovationFamily::SkewGaussian;
    if (s == "student_t") return InnovationFamily::StudentT;
    if (s == "skew_t") return InnovationFamily::SkewT;
    throw std::invalid_argument("unknown innovation family: " + s);
}

struct InnovationSpec {
    InnovationFamily family = InnovationFamily::Gaussian;
    double nu = 8.0;      // degrees of freedom, t families only (> 2)
    double lambda = 1.0;  // skewness, skew families only (> 0, 1 = symmetric)

    bool has_nu() const {
        return family == InnovationFamily::StudentT || family == InnovationFamily::SkewT;
    }
    bool has_lambda() const {
        return family == InnovationFamily::SkewGaussian || family == InnovationFamily::SkewT;
    }
    int n_params() const { return (has_nu() ? 1 : 0) + (has_lambda() ? 1 : 0); }

    void validate() const {
        if (has_nu() && !(nu > 2.0))
            throw std::invalid_argument("innovation nu must exceed 2 (finite variance)");
        if (has_lambda() && !(lambda > 0.0))
            throw std::invalid_argument("innovation skewness lambda must be positive");
    }
};

/// Standardized innovation distribution: mean 0, variance 1 by construction.
///
/// The symmetric bases are the standard normal and the variance-rescaled
/// Student-t. Skew variants apply the two-piece single-parameter skewing
/// (lambda scales the two half-densities; lambda = 1 recovers the base) and
/// are re-standardized through the closed-form first two moments.
class InnovationDist {
public:
    explicit InnovationDist(InnovationSpec spec) : spec_(spec) {
        spec_.validate();
        if (base_is_t()) t_scale_ = std::sqrt(spec_.nu / (spec_.nu - 2.0));
        if (spec_.has_lambda()) {
            const double l = spec_.lambda;
            // E|base| for the standardized base density.
            const double m_abs =
                base_is_t()
                    ? 2.0 * std::sqrt(spec_.nu - 2.0) *
                          std::exp(log_gamma(0.5 * (spec_.nu + 1.0)) - log_gamma(0.5 * spec_.nu)) /
                          (std::sqrt(pi_v) * (spec_.nu - 1.0))
                    : std::sqrt(2.0 / pi_v);
            skew_mean_ = m_abs * (l - 1.0 / l);
            const double ex2 = (l * l * l + 1.0 / (l * l * l)) / (l + 1.0 / l);
            skew_sd_ = std::sqrt(ex2 - skew_mean_ * skew_mean_);
        }
    }

    const InnovationSpec& spec() const { return spec_; }

    double log_pdf(double x) const {
        if (!spec_.has_lambda()) return base_log_pdf(x);
        const double l = spec_.lambda;
        const double z = skew_mean_ + skew_sd_ * x;
        const double lc = std::log(2.0 * l / (1.0 + l * l)) + std::log(skew_sd_);
        return lc + (z >= 0.0 ? base_log_pdf(z / l) : base_log_pdf(z * l));
    }

    double pdf(double x) const { return std::exp(log_pdf(x)); }

    double cdf(double x) const {
        if (!spec_.has_lambda()) return base_cdf(x);
        const double l = spec_.lambda;
        const double z = skew_mean_ + skew_sd_ * x;
        if (z < 0.0) return 2.0 / (1.0 + l * l) * base_cdf(z * l);
        return 1.0 / (1.0 + l * l) +
               2.0 * l * l / (1.0 + l * l) * (base_cdf(z / l) - 0.5);
    }

    double quantile(double u) const {
        if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("quantile: u must be in (0,1)");
        if (!spec_.has_lambda()) return base_quantile(u);
        const double l = spec_.lambda;
        const double p0 = 1.0 / (1.0 + l * l);
        double z;
        if (u < p0)
            z = base_quantile(0.5 * u * (1.0 + l * l)) / l;
        else
            z = l * base_quantile(0.5 + (u - p0) * (1.0 + l * l) / (2.0 * l * l));
        return (z - skew_mean_) / skew_sd_;
    }

    /// Inverse-CDF sampling keeps the draw an exact deterministic function of
    /// the uniform stream.
    double sample(Rng& rng) const { return quantile(rng.uniform()); }

private:
    bool base_is_t() const { return spec_.has_nu(); }

    double base_log_pdf(double x) const {
        if (!base_is_t()) return norm_log_pdf(x);
        return t_log_pdf(x * t_scale_, spec_.nu) + std::log(t_scale_);
    }
    double base_cdf(double x) const {
        if (!base_is_t()) return norm_cdf(x);
        return t_cdf(x * t_scale_, spec_.nu);
    }
    double base_quantile(double u) const {
        if (!base_is_t()) return norm_quantile(u);
        return t_quantile(u, spec_.nu) / t_scale_;
    }

    InnovationSpec spec_;
    double t_scale_ = 1.0;   // sqrt(nu/(nu-2)), maps standardized to plain t
    double skew_mean_ = 0.0; // mean of the skewed, unstandardized variable
    double skew_sd_ = 1.0;
};

}  // namespace codep
