#include "fraclab/fracops.hpp"
#include "fraclab/gamma.hpp"
#include "fraclab/kahan.hpp"

#include <cmath>

namespace fraclab::fracops {

std::vector<double> integral_weights(double alpha, int n_max) {
    FractionalOrder ord(alpha);
    if (n_max < 0) throw UsageError("integral_weights: n_max must be nonnegative");
    const double inv_g = 1.0 / gamma_fn(1.0 + alpha);
    std::vector<double> a(static_cast<size_t>(n_max) + 1);
    a[0] = inv_g;
    for (int n = 1; n <= n_max; ++n) {
        // (n+1)^alpha - n^alpha = n^alpha * expm1(alpha * log1p(1/n)), cancellation-free
        a[n] = std::pow(n, alpha) * std::expm1(alpha * std::log1p(1.0 / n)) * inv_g;
    }
    return a;
}

std::vector<double> convolution_inverse(std::span<const double> a, int n_max) {
    if (a.empty()) throw ZeroLeadingCoefficient("convolution_inverse: empty sequence");
    if (a[0] == 0.0) throw ZeroLeadingCoefficient("convolution_inverse: a[0] must be nonzero");
    if (n_max < 0) throw UsageError("convolution_inverse: n_max must be nonnegative");
    if (static_cast<size_t>(n_max) >= a.size())
        throw TableTooShort("convolution_inverse: sequence shorter than requested n_max");
    std::vector<double> b(static_cast<size_t>(n_max) + 1);
    const double inv_a0 = 1.0 / a[0];
    b[0] = inv_a0;
    for (int n = 1; n <= n_max; ++n) {
        NeumaierSum s;
        for (int j = 1; j <= n; ++j) s.add(a[j] * b[n - j]);
        b[n] = -inv_a0 * s.value();
    }
    return b;
}

CoefficientTable caputo_coefficients(double alpha, int n_max) {
    if (n_max < 1) throw UsageError("caputo_coefficients: n_max must be at least 1");
    CoefficientTable t;
    t.alpha = FractionalOrder(alpha).alpha;
    t.a = integral_weights(alpha, n_max);
    t.a_inv = convolution_inverse(t.a, n_max);
    t.c.resize(t.a_inv.size());
    t.c[0] = t.a_inv[0];
    for (int i = 1; i <= n_max; ++i) t.c[i] = -t.a_inv[i];
    t.c_tail.assign(static_cast<size_t>(n_max) + 1, 0.0);
    NeumaierSum partial; // sum_{i=1}^{n-1} c_i
    for (int n = 1; n <= n_max; ++n) {
        t.c_tail[n] = t.c[0] - partial.value();
        partial.add(t.c[n]);
    }
    return t;
}

L1Coefficients l1_coefficients(double alpha, int n_max) {
    FractionalOrder ord(alpha);
    if (n_max < 1) throw UsageError("l1_coefficients: n_max must be at least 1");
    const double inv_g = 1.0 / gamma_fn(2.0 - alpha);
    const double b = 1.0 - alpha;
    L1Coefficients out;
    out.alpha = alpha;
    out.cbar.resize(static_cast<size_t>(n_max));
    out.cbar_tail.assign(static_cast<size_t>(n_max) + 1, 0.0);
    out.cbar[0] = inv_g;
    for (int j = 1; j < n_max; ++j)
        out.cbar[j] = -(std::pow(j + 1.0, b) - 2.0 * std::pow(static_cast<double>(j), b) + std::pow(j - 1.0, b)) * inv_g;
    for (int n = 1; n <= n_max; ++n)
        out.cbar_tail[n] = (std::pow(static_cast<double>(n), b) - std::pow(n - 1.0, b)) * inv_g;
    return out;
}

std::vector<double> discrete_caputo(const CoefficientTable& table, std::span<const double> x, double x0, double k) {
    const int n_steps = static_cast<int>(x.size());
    if (n_steps > table.n_max()) throw TableTooShort("discrete_caputo: table shorter than path");
    if (!(k > 0.0)) throw UsageError("discrete_caputo: step must be positive");
    const double scale = std::pow(k, -table.alpha);
    std::vector<double> d(static_cast<size_t>(n_steps));
    for (int n = 1; n <= n_steps; ++n) {
        NeumaierSum s;
        s.add(table.c[0] * x[n - 1]);
        for (int i = 1; i <= n - 1; ++i) s.add(-table.c[i] * x[n - 1 - i]);
        s.add(-table.c_tail[n] * x0);
        d[n - 1] = scale * s.value();
    }
    return d;
}

std::vector<double> discrete_frac_integral(const CoefficientTable& table, std::span<const double> f, double k) {
    const int n_steps = static_cast<int>(f.size());
    if (n_steps > table.n_max()) throw TableTooShort("discrete_frac_integral: table shorter than path");
    if (!(k > 0.0)) throw UsageError("discrete_frac_integral: step must be positive");
    const double scale = std::pow(k, table.alpha);
    std::vector<double> J(static_cast<size_t>(n_steps));
    for (int n = 1; n <= n_steps; ++n) {
        NeumaierSum s;
        for (int m = 1; m <= n; ++m) s.add(table.a[n - m] * f[m - 1]);
        J[n - 1] = scale * s.value();
    }
    return J;
}

bool check_complete_monotone(std::span<const double> v, int depth, double tol) {
    if (depth < 0) throw UsageError("check_complete_monotone: depth must be nonnegative");
    if (v.empty()) throw UsageError("check_complete_monotone: empty sequence");
    std::vector<double> w(v.begin(), v.end());
    for (int j = 0; j <= depth; ++j) {
        const size_t len = v.size() - static_cast<size_t>(j);
        if (len == 0) break;
        for (size_t m = 0; m < len; ++m)
            if (w[m] < -tol) return false;
        for (size_t m = 0; m + 1 < len; ++m) w[m] -= w[m + 1];
    }
    return true;
}

double generating_partial(std::span<const double> seq, double z, int terms) {
    if (terms < 0 || static_cast<size_t>(terms) > seq.size())
        throw UsageError("generating_partial: terms out of range");
    NeumaierSum s;
    double zn = 1.0;
    for (int n = 0; n < terms; ++n) {
        s.add(seq[n] * zn);
        zn *= z;
    }
    return s.value();
}

} // namespace fraclab::fracops
