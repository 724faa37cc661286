#pragma once
#include "fraclab/errors.hpp"
#include "fraclab/grid.hpp"

#include <span>
#include <vector>

namespace fraclab::fracops {

// Fractional order alpha in (0, 1].
struct FractionalOrder {
    double alpha;
    explicit FractionalOrder(double a) : alpha(a) {
        if (!(a > 0.0) || !(a <= 1.0)) throw InvalidOrder("FractionalOrder: alpha must lie in (0, 1]");
    }
};

// Deconvolution coefficients of the piecewise-constant kernel quadrature.
//   a[n]      = ((n+1)^alpha - n^alpha) / Gamma(1+alpha),      n = 0..n_max
//   a_inv     = convolution inverse of a (a * a_inv = delta)
//   c[0]      = a_inv[0] = Gamma(1+alpha);  c[i] = -a_inv[i], i >= 1 (all positive)
//   c_tail[n] = c[0] - sum_{i=1}^{n-1} c[i],                  n = 1..n_max
struct CoefficientTable {
    double alpha = 0.5;
    std::vector<double> a;
    std::vector<double> a_inv;
    std::vector<double> c;
    std::vector<double> c_tail; // index 0 unused
    int n_max() const { return static_cast<int>(a.size()) - 1; }
};

std::vector<double> integral_weights(double alpha, int n_max);

// b with (a * b)[0] = 1 and (a * b)[n] = 0 for 1 <= n <= n_max.
std::vector<double> convolution_inverse(std::span<const double> a, int n_max);

CoefficientTable caputo_coefficients(double alpha, int n_max);

// Classical L1 scheme coefficients for cross-checks:
//   Gamma(2-alpha)*cbar[0] = 1
//   Gamma(2-alpha)*cbar[j] = -((j+1)^{1-alpha} - 2 j^{1-alpha} + (j-1)^{1-alpha})
//   Gamma(2-alpha)*cbar_tail[n] = n^{1-alpha} - (n-1)^{1-alpha}
struct L1Coefficients {
    double alpha;
    std::vector<double> cbar;      // j = 0..n_max-1
    std::vector<double> cbar_tail; // n = 1..n_max, index 0 unused
};
L1Coefficients l1_coefficients(double alpha, int n_max);

// Discrete Caputo derivative of the path (x0, x[0], ..., x[N-1]) at nodes 1..N:
//   D[n] = k^{-alpha} * (c0*x_n - sum_{i=1}^{n-1} c_i x_{n-i} - c_tail[n]*x0)
// x holds the values at nodes 1..N; the returned vector has length N.
std::vector<double> discrete_caputo(const CoefficientTable& table, std::span<const double> x, double x0, double k);

// Discrete fractional integral of (f[0], ..., f[N-1]) = values at nodes 1..N
// (the node-0 value does not enter):  J[n] = k^alpha * sum_{m=1}^n a[n-m] f_m.
std::vector<double> discrete_frac_integral(const CoefficientTable& table, std::span<const double> f, double k);

// Finite-depth complete monotonicity: ((I-S)^j v)_m >= -tol for all
// 0 <= j <= depth and valid m, where (S v)_m = v_{m+1}.
bool check_complete_monotone(std::span<const double> v, int depth, double tol = 1e-12);

// Partial generating function sum_{n < terms} seq[n] z^n.
double generating_partial(std::span<const double> seq, double z, int terms);

} // namespace fraclab::fracops
