#pragma once
#include "fraclab/errors.hpp"

#include <cmath>
#include <functional>
#include <queue>
#include <vector>

namespace fraclab {

struct QuadResult {
    double value = 0.0;
    double error = 0.0; // estimated absolute error
    int evals = 0;
};

namespace detail {
// Gauss-Kronrod 7-15 nodes/weights on [-1, 1] (positive half; node 0 included once).
constexpr double kGK15Nodes[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                                  0.741531185599394, 0.586087235467691, 0.405845151377397,
                                  0.207784955007898, 0.0};
constexpr double kGK15Weights[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                                    0.140653259715525, 0.169004726639267, 0.190350578064785,
                                    0.204432940075298, 0.209482141084728};
// Gauss-7 weights aligned with odd Kronrod nodes (indices 1,3,5,7 above).
constexpr double kG7Weights[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                                  0.417959183673469};

struct Interval {
    double a, b, value, error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

inline Interval gk15(const std::function<double(double)>& f, double a, double b, int& evals) {
    const double h = 0.5 * (b - a);
    const double m = 0.5 * (a + b);
    double k_sum = 0.0, g_sum = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double dx = h * kGK15Nodes[i];
        double fv;
        if (i == 7) {
            fv = f(m);
            ++evals;
        } else {
            fv = f(m - dx) + f(m + dx);
            evals += 2;
        }
        k_sum += kGK15Weights[i] * fv;
        if (i % 2 == 1) g_sum += kG7Weights[i / 2] * fv;
    }
    const double value = k_sum * h;
    const double err = std::pow(200.0 * std::abs(k_sum - g_sum) * std::abs(h), 1.5);
    return {a, b, value, std::max(err, std::abs(value) * 1e-16)};
}
} // namespace detail

// Globally adaptive Gauss-Kronrod integration of f over [a, b].
// Splits the current worst interval until the summed error estimate drops
// below abs_tol or the interval budget runs out.
inline QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                                     int max_intervals = 4000) {
    if (!(b > a)) throw UsageError("integrate_adaptive: need b > a");
    QuadResult out;
    std::priority_queue<detail::Interval> q;
    q.push(detail::gk15(f, a, b, out.evals));
    double total = q.top().value, err = q.top().error;
    int n_intervals = 1;
    while (err > abs_tol && n_intervals < max_intervals) {
        detail::Interval worst = q.top();
        q.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) { // interval at rounding resolution
            q.push(worst);
            break;
        }
        detail::Interval left = detail::gk15(f, worst.a, mid, out.evals);
        detail::Interval right = detail::gk15(f, mid, worst.b, out.evals);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        q.push(left);
        q.push(right);
        ++n_intervals;
    }
    // re-sum from the queue for a tighter final estimate
    double v = 0.0, e = 0.0;
    while (!q.empty()) {
        v += q.top().value;
        e += q.top().error;
        q.pop();
    }
    out.value = v;
    out.error = e;
    if (out.error > abs_tol) throw NotConverged("integrate_adaptive: error estimate above tolerance");
    return out;
}

} // namespace fraclab
