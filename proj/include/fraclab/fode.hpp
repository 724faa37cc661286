#pragma once
#include "fraclab/fracops.hpp"
#include "fraclab/grid.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace fraclab::fode {

struct SolverOptions {
    double newton_tol = 1e-12; // absolute residual target
    int max_newton_iters = 50;
    int max_fixed_point_iters = 200;
    int max_bisection_iters = 200;
    double mlf_tol = 1e-12;
};

// Right-hand side f(t, x) of D^alpha X = f(t, X), x in R^d.
struct RhsFunction {
    int dim = 1;
    std::function<void(double t, std::span<const double> x, std::span<double> out)> eval;
    // optional row-major d x d Jacobian; finite differences otherwise
    std::function<void(double t, std::span<const double> x, std::span<double> jac)> jacobian;
    std::optional<double> lipschitz_L;
    bool monotone_nonincreasing = false;
};

// Largest step k with k^alpha * L < Gamma(1+alpha).
double step_constraint(double alpha, double L);

// Implicit scheme for D^alpha X = lambda X, X(0) = x0:
//   (c0 - k^alpha lambda) X_n = sum_{i=1}^{n-1} c_i X_{n-i} + c_tail[n] x0.
// For lambda > 0 requires the stability window k^alpha lambda <= c0/2.
Path solve_linear_implicit(const fracops::CoefficientTable& table, double lambda, double x0, const Grid& grid,
                           const SolverOptions& opts = {});

// Implicit scheme for general f via per-step Newton (damped fixed-point and,
// in 1-D, bisection as fallbacks).
Path solve_implicit(const fracops::CoefficientTable& table, const RhsFunction& f, std::span<const double> x0,
                    const Grid& grid, const SolverOptions& opts = {});

// Same limit through the integral form X_n = x0 + k^alpha sum a_{n-m} f(t_m, X_m).
Path solve_implicit_integral(const fracops::CoefficientTable& table, const RhsFunction& f, std::span<const double> x0,
                             const Grid& grid, const SolverOptions& opts = {});

// x0 * E_alpha(lambda t^alpha)
double exact_linear_solution(double alpha, double lambda, double x0, double t, double tol = 1e-12);

// sub[n] <= sol[n] + 1e-10 and sol[n] <= sup[n] + 1e-10 at every node.
bool comparison_check(std::span<const double> sub, std::span<const double> sol, std::span<const double> sup);

// Discrete chain inequality for convex E: (D^alpha E(X))_n <= grad E(X_n) . (D^alpha X)_n + 1e-10.
bool convex_functional_check(const fracops::CoefficientTable& table, const Path& x,
                             const std::function<double(std::span<const double>)>& E,
                             const std::function<void(std::span<const double>, std::span<double>)>& gradE);

// Coarse step-2k solution dominates the step-k solution of the same lambda > 0
// problem pointwise (piecewise-constant interpolants, 1e-12 slack).
bool step_doubling_check(double alpha, double lambda, double x0, double k, double T, const SolverOptions& opts = {});

// Least-squares slope of log(err) against log(k).
double observed_order(std::span<const double> ks, std::span<const double> errs);

} // namespace fraclab::fode
