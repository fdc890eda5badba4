#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace codep {

using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;

struct OptimResult {
    Eigen::VectorXd x;
    double fmin = std::numeric_limits<double>::infinity();
    int evaluations = 0;
    bool converged = false;
};

/// Nelder-Mead downhill simplex on an unconstrained objective. Returns the
/// best vertex; NaN/inf objective values are treated as +inf so constraint
/// violations encoded in the objective simply repel the simplex.
inline OptimResult nelder_mead(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                               double init_step = 0.25, double ftol = 1e-10,
                               int max_evals = 4000) {
    const int n = static_cast<int>(x0.size());
    int evals = 0;
    auto safe_f = [&](const Eigen::VectorXd& x) {
        ++evals;
        double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<Eigen::VectorXd> vx(n + 1, x0);
    std::vector<double> vf(n + 1);
    for (int i = 1; i <= n; ++i) {
        double h = init_step * std::max(1.0, std::abs(x0[i - 1]));
        vx[i][i - 1] += h;
    }
    for (int i = 0; i <= n; ++i) vf[i] = safe_f(vx[i]);

    auto order = [&] {
        std::vector<int> idx(n + 1);
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return vf[a] < vf[b]; });
        std::vector<Eigen::VectorXd> nx(n + 1);
        std::vector<double> nf(n + 1);
        for (int i = 0; i <= n; ++i) {
            nx[i] = vx[idx[i]];
            nf[i] = vf[idx[i]];
        }
        vx.swap(nx);
        vf.swap(nf);
    };

    order();
    while (evals < max_evals) {
        if (std::isfinite(vf[n]) && vf[n] - vf[0] < ftol * (std::abs(vf[0]) + ftol)) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) centroid += vx[i];
        centroid /= n;

        Eigen::VectorXd xr = centroid + (centroid - vx[n]);
        double fr = safe_f(xr);
        if (fr < vf[0]) {
            Eigen::VectorXd xe = centroid + 2.0 * (centroid - vx[n]);
            double fe = safe_f(xe);
            if (fe < fr) {
                vx[n] = xe;
                vf[n] = fe;
            } else {
                vx[n] = xr;
                vf[n] = fr;
            }
        } else if (fr < vf[n - 1]) {
            vx[n] = xr;
            vf[n] = fr;
        } else {
            Eigen::VectorXd xc = centroid + 0.5 * (vx[n] - centroid);
            double fc = safe_f(xc);
            if (fc < vf[n]) {
                vx[n] = xc;
                vf[n] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    vx[i] = vx[0] + 0.5 * (vx[i] - vx[0]);
                    vf[i] = safe_f(vx[i]);
                }
            }
        }
        order();
    }
    return {vx[0], vf[0], evals, evals < max_evals};
}

/// Brent minimization on [a,b]; f need not be unimodal over the whole
/// interval if the caller brackets the minimum first.
inline OptimResult brent_min(const std::function<double(double)>& f, double a, double b,
                             double tol = 1e-8, int max_iter = 200) {
    const double golden = 0.3819660112501051;
    double x = a + golden * (b - a), w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    int evals = 1;
    double d = 0.0, e = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        const double m = 0.5 * (a + b);
        const double tol1 = tol * std::abs(x) + 1e-12;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - m) <= tol2 - 0.5 * (b - a))
            return {Eigen::VectorXd::Constant(1, x), fx, evals, true};
        double p = 0.0, q = 0.0, r = 0.0;
        bool parabolic = false;
        if (std::abs(e) > tol1) {
            r = (x - w) * (fx - fv);
            q = (x - v) * (fx - fw);
            p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            if (std::abs(p) < std::abs(0.5 * q * e) && p > q * (a - x) && p < q * (b - x)) {
                e = d;
                d = p / q;
                parabolic = true;
            }
        }
        if (!parabolic) {
            e = (x < m) ? b - x : a - x;
            d = golden * e;
        }
        const double u = (std::abs(d) >= tol1) ? x + d : x + (d > 0 ? tol1 : -tol1);
        const double fu = f(u);
        ++evals;
        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    return {Eigen::VectorXd::Constant(1, x), fx, evals, false};
}

/// Coarse grid scan followed by Brent on the bracketing cell.
inline OptimResult grid_then_brent(const std::function<double(double)>& f, double lo, double hi,
                                   int grid = 25, double tol = 1e-8) {
    int best = 0;
    double fbest = std::numeric_limits<double>::infinity();
    std::vector<double> xs(grid), fs(grid);
    for (int i = 0; i < grid; ++i) {
        xs[i] = lo + (hi - lo) * i / (grid - 1.0);
        fs[i] = f(xs[i]);
        if (!std::isfinite(fs[i])) fs[i] = std::numeric_limits<double>::infinity();
        if (fs[i] < fbest) {
            fbest = fs[i];
            best = i;
        }
    }
    const double a = xs[std::max(0, best - 1)];
    const double b = xs[std::min(grid - 1, best + 1)];
    auto r = brent_min(f, a, b, tol);
    r.evaluations += grid;
    if (fbest < r.fmin) {
        r.x[0] = xs[best];
        r.fmin = fbest;
    }
    return r;
}

inline Eigen::VectorXd numerical_gradient(const ObjectiveFn& f, const Eigen::VectorXd& x,
                                          double rel_step = 1e-6) {
    const int n = static_cast<int>(x.size());
    Eigen::VectorXd g(n), xp = x, xm = x;
    for (int i = 0; i < n; ++i) {
        const double h = rel_step * std::max(1.0, std::abs(x[i]));
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return g;
}

/// Central-difference Hessian. steps[i] overrides the default per-coordinate
/// step, which matters for parameters living on very different scales.
inline Eigen::MatrixXd numerical_hessian(const ObjectiveFn& f, const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& steps = Eigen::VectorXd()) {
    const int n = static_cast<int>(x.size());
    Eigen::VectorXd h(n);
    for (int i = 0; i < n; ++i)
        h[i] = steps.size() == n ? steps[i] : 1e-4 * std::max(1e-3, std::abs(x[i]));
    Eigen::MatrixXd H(n, n);
    const double f0 = f(x);
    Eigen::VectorXd xt = x;
    for (int i = 0; i < n; ++i) {
        xt[i] = x[i] + h[i];
        const double fp = f(xt);
        xt[i] = x[i] - h[i];
        const double fm = f(xt);
        xt[i] = x[i];
        H(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            xt[i] = x[i] + h[i]; xt[j] = x[j] + h[j];
            const double fpp = f(xt);
            xt[j] = x[j] - h[j];
            const double fpm = f(xt);
            xt[i] = x[i] - h[i]; xt[j] = x[j] + h[j];
            const double fmp = f(xt);
            xt[j] = x[j] - h[j];
            const double fmm = f(xt);
            xt[i] = x[i]; xt[j] = x[j];
            H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
        }
    }
    return H;
}

/// BFGS with numerical gradients and backtracking line search. Used to polish
/// a Nelder-Mead solution; falls back to the start point if no improvement.
inline OptimResult bfgs_polish(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                               int max_iter = 100, double gtol = 1e-7) {
    const int n = static_cast<int>(x0.size());
    Eigen::VectorXd x = x0;
    double fx = f(x);
    int evals = 1;
    Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd g = numerical_gradient(f, x);
    evals += 2 * n;
    for (int it = 0; it < max_iter; ++it) {
        if (g.norm() < gtol) break;
        Eigen::VectorXd p = -Hinv * g;
        if (!p.allFinite() || p.dot(g) >= 0.0) {
            Hinv.setIdentity();
            p = -g;
        }
        double step = 1.0;
        double fnew = std::numeric_limits<double>::infinity();
        Eigen::VectorXd xnew;
        const double slope = g.dot(p);
        for (int ls = 0; ls < 40; ++ls) {
            xnew = x + step * p;
            fnew = f(xnew);
            ++evals;
            if (std::isfinite(fnew) && fnew <= fx + 1e-4 * step * slope) break;
            step *= 0.5;
        }
        if (!(std::isfinite(fnew) && fnew < fx)) break;
        Eigen::VectorXd gnew = numerical_gradient(f, xnew);
        evals += 2 * n;
        const Eigen::VectorXd s = xnew - x;
        const Eigen::VectorXd y = gnew - g;
        const double sy = s.dot(y);
        if (sy > 1e-12) {
            const Eigen::VectorXd Hy = Hinv * y;
            const double yHy = y.dot(Hy);
            Hinv += ((sy + yHy) / (sy * sy)) * (s * s.transpose()) -
                    (Hy * s.transpose() + s * Hy.transpose()) / sy;
        }
        x = xnew;
        fx = fnew;
        g = gnew;
    }
    return {x, fx, evals, true};
}

}  // namespace codep
