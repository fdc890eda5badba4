#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace codep {

/// Monotone cubic Hermite interpolant (Fritsch-Butland tangents). Input
/// abscissae must be strictly increasing and ordinates monotone; the
/// interpolant then preserves monotonicity, which keeps numerically inverted
/// CDFs honest.
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: need >= 2 nodes");
        m_.assign(n, 0.0);
        std::vector<double> h(n - 1), s(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            if (!(h[i] > 0.0)) throw std::invalid_argument("MonotoneCubic: x not increasing");
            s[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        m_[0] = s[0];
        m_[n - 1] = s[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (s[i - 1] * s[i] <= 0.0) {
                m_[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                m_[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
            }
        }
    }

    double operator()(double xq) const {
        const std::size_t n = x_.size();
        if (xq <= x_.front()) return y_.front();
        if (xq >= x_.back()) return y_.back();
        const std::size_t i =
            std::upper_bound(x_.begin(), x_.end(), xq) - x_.begin() - 1;
        const double h = x_[i + 1] - x_[i];
        const double t = (xq - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1;
        const double h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2;
        const double h11 = t3 - t2;
        return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    std::vector<double> x_, y_, m_;
};

}  // namespace codep
