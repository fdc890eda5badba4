#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

namespace codep {

/// Gauss-Legendre rule on [-1,1]. Nodes found by Newton iteration on P_n with
/// the Abramowitz-Stegun starting guess; accurate to ~1e-15 for n <= 1024.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(std::size_t n) {
        if (n == 0) throw std::invalid_argument("quadrature order must be positive");
        nodes.resize(n);
        weights.resize(n);
        const std::size_t m = (n + 1) / 2;
        for (std::size_t i = 0; i < m; ++i) {
            double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                // Legendre recurrence for P_n(x) and its derivative.
                double p0 = 1.0, p1 = x;
                for (std::size_t k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
        }
    }

    /// Shared cache; rules are immutable once built.
    static const GaussLegendre& get(std::size_t n) {
        static std::map<std::size_t, GaussLegendre> cache;
        auto it = cache.find(n);
        if (it == cache.end()) it = cache.emplace(n, GaussLegendre(n)).first;
        return it->second;
    }
};

/// Nodes/weights of the n-point rule mapped to [a,b].
inline void gl_on_interval(std::size_t n, double a, double b, std::vector<double>& x,
                           std::vector<double>& w) {
    const auto& rule = GaussLegendre::get(n);
    x.resize(n);
    w.resize(n);
    const double c = 0.5 * (b - a), m = 0.5 * (a + b);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = m + c * rule.nodes[i];
        w[i] = c * rule.weights[i];
    }
}

inline double integrate_1d(const std::function<double(double)>& f, double a, double b,
                           std::size_t n) {
    std::vector<double> x, w;
    gl_on_interval(n, a, b, x, w);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * f(x[i]);
    return s;
}

/// Adaptive 1-D integration by panel bisection with an (n, 2n) error estimate.
inline double integrate_1d_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol = 1e-10, std::size_t base_n = 16,
                                    int max_depth = 24) {
    struct Panel {
        double a, b;
        int depth;
    };
    double total = 0.0;
    std::vector<Panel> stack{{a, b, 0}};
    while (!stack.empty()) {
        Panel p = stack.back();
        stack.pop_back();
        const double coarse = integrate_1d(f, p.a, p.b, base_n);
        const double fine = integrate_1d(f, p.a, p.b, 2 * base_n);
        if (std::abs(fine - coarse) < abs_tol || p.depth >= max_depth) {
            total += fine;
        } else {
            const double mid = 0.5 * (p.a + p.b);
            stack.push_back({p.a, mid, p.depth + 1});
            stack.push_back({mid, p.b, p.depth + 1});
        }
    }
    return total;
}

/// Tensor-product Gauss-Legendre integral of f over [a,b] x [a,b].
inline double integrate_2d(const std::function<double(double, double)>& f, double a, double b,
                           std::size_t n_per_axis) {
    std::vector<double> x, w;
    gl_on_interval(n_per_axis, a, b, x, w);
    double s = 0.0;
    for (std::size_t i = 0; i < n_per_axis; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n_per_axis; ++j) row += w[j] * f(x[i], x[j]);
        s += w[i] * row;
    }
    return s;
}

struct Quad2dResult {
    double value = 0.0;
    double err_estimate = 0.0;  // |I_{2n} - I_n|
};

/// Node-doubling check: integrates with n and 2n nodes per axis and reports
/// the difference as the error estimate.
inline Quad2dResult integrate_2d_checked(const std::function<double(double, double)>& f, double a,
                                         double b, std::size_t n_per_axis) {
    const double coarse = integrate_2d(f, a, b, n_per_axis);
    const double fine = integrate_2d(f, a, b, 2 * n_per_axis);
    return {fine, std::abs(fine - coarse)};
}

}  // namespace codep
