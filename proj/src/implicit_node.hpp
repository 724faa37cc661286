#pragma once
// Shared per-node implicit solve: coef0 * x - beta * f(x) = rhs.
// Newton (analytic or finite-difference Jacobian), then damped fixed point,
// then bisection in 1-D, before giving up.
#include "fraclab/errors.hpp"
#include "fraclab/fode.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace fraclab::detail {

using EvalFn = std::function<void(std::span<const double>, std::span<double>)>;

// Gaussian elimination with partial pivoting; a is row-major d x d, b is
// overwritten with the solution.
inline void solve_dense(std::vector<double>& a, std::vector<double>& b, int d) {
    for (int col = 0; col < d; ++col) {
        int piv = col;
        for (int r = col + 1; r < d; ++r)
            if (std::abs(a[r * d + col]) > std::abs(a[piv * d + col])) piv = r;
        if (a[piv * d + col] == 0.0) throw NewtonDiverged("solve_dense: singular Jacobian");
        if (piv != col) {
            for (int j = 0; j < d; ++j) std::swap(a[col * d + j], a[piv * d + j]);
            std::swap(b[col], b[piv]);
        }
        const double inv = 1.0 / a[col * d + col];
        for (int r = col + 1; r < d; ++r) {
            const double m = a[r * d + col] * inv;
            if (m == 0.0) continue;
            for (int j = col; j < d; ++j) a[r * d + j] -= m * a[col * d + j];
            b[r] -= m * b[col];
        }
    }
    for (int r = d - 1; r >= 0; --r) {
        double acc = b[r];
        for (int j = r + 1; j < d; ++j) acc -= a[r * d + j] * b[j];
        b[r] = acc / a[r * d + r];
    }
}

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline void solve_node(const EvalFn& eval, const EvalFn& jac, int d, double coef0, double beta,
                       std::span<const double> rhs, std::span<double> x, const fode::SolverOptions& opts) {
    std::vector<double> fx(d), g(d), jm(static_cast<size_t>(d) * d), xt(d), fph(d), sv(d);

    auto residual = [&](std::span<const double> xv, std::span<double> out) {
        eval(xv, fx);
        for (int i = 0; i < d; ++i) out[i] = coef0 * xv[i] - beta * fx[i] - rhs[i];
    };

    residual(x, g);
    for (int it = 0; it < opts.max_newton_iters; ++it) {
        if (max_abs(g) <= opts.newton_tol) return;
        if (jac) {
            jac(x, jm);
        } else { // forward differences on f
            eval(x, fx);
            std::copy(x.begin(), x.end(), xt.begin());
            for (int j = 0; j < d; ++j) {
                const double h = 1e-8 * std::max(1.0, std::abs(x[j]));
                xt[j] = x[j] + h;
                eval(xt, fph);
                xt[j] = x[j];
                for (int i = 0; i < d; ++i) jm[i * d + j] = (fph[i] - fx[i]) / h;
            }
        }
        std::vector<double> m(jm);
        for (int i = 0; i < d * d; ++i) m[i] *= -beta;
        for (int i = 0; i < d; ++i) m[i * d + i] += coef0;
        std::copy(g.begin(), g.end(), sv.begin());
        try {
            solve_dense(m, sv, d);
        } catch (const NewtonDiverged&) {
            break; // fall to the next strategy
        }
        bool finite = true;
        for (int i = 0; i < d; ++i) {
            x[i] -= sv[i];
            if (!std::isfinite(x[i])) finite = false;
        }
        if (!finite) break;
        residual(x, g);
    }
    if (max_abs(g) <= opts.newton_tol) return;

    // damped fixed point x <- (1-th) x + th (beta f + rhs)/coef0
    const double th = 0.5;
    for (int it = 0; it < opts.max_fixed_point_iters; ++it) {
        eval(x, fx);
        for (int i = 0; i < d; ++i) x[i] = (1.0 - th) * x[i] + th * (beta * fx[i] + rhs[i]) / coef0;
        residual(x, g);
        if (max_abs(g) <= opts.newton_tol) return;
    }

    if (d == 1) {
        auto g1 = [&](double v) {
            double out;
            eval({&v, 1}, {&out, 1});
            return coef0 * v - beta * out - rhs[0];
        };
        double lo = x[0], hi = x[0];
        double glo = g1(lo), ghi = glo;
        double width = std::max(1.0, std::abs(x[0]));
        for (int it = 0; it < 60 && glo * ghi > 0.0; ++it) {
            lo -= width;
            hi += width;
            width *= 2.0;
            glo = g1(lo);
            ghi = g1(hi);
        }
        if (glo * ghi <= 0.0) {
            for (int it = 0; it < opts.max_bisection_iters; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double gm = g1(mid);
                if (std::abs(gm) <= opts.newton_tol || hi - lo < 1e-16 * std::max(1.0, std::abs(mid))) {
                    x[0] = mid;
                    return;
                }
                if ((gm < 0.0) == (glo < 0.0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            x[0] = 0.5 * (lo + hi);
            if (std::abs(g1(x[0])) <= opts.newton_tol) return;
        }
    }
    throw NewtonDiverged("solve_node: residual tolerance not reached");
}

} // namespace fraclab::detail
