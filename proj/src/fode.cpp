#include "fraclab/fode.hpp"
#include "fraclab/gamma.hpp"
#include "fraclab/kahan.hpp"
#include "fraclab/mlf.hpp"
#include "implicit_node.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace fraclab::fode {

namespace {

// Solves coef0 * x - beta * f(t, x) = rhs for x at fixed t, starting from guess.
void solve_node(const RhsFunction& f, double t, double coef0, double beta, std::span<const double> rhs,
                std::span<double> x, const SolverOptions& opts) {
    detail::EvalFn eval = [&](std::span<const double> xv, std::span<double> out) { f.eval(t, xv, out); };
    detail::EvalFn jac;
    if (f.jacobian) jac = [&](std::span<const double> xv, std::span<double> out) { f.jacobian(t, xv, out); };
    detail::solve_node(eval, jac, f.dim, coef0, beta, rhs, x, opts);
}

void check_table(const fracops::CoefficientTable& table, const Grid& grid, const char* who) {
    if (table.n_max() < grid.n_steps) throw TableTooShort(std::string(who) + ": table shorter than grid");
}

void check_lipschitz(const fracops::CoefficientTable& table, const RhsFunction& f, const Grid& grid) {
    if (f.lipschitz_L && *f.lipschitz_L > 0.0) {
        if (std::pow(grid.k(), table.alpha) * *f.lipschitz_L >= table.c[0])
            throw StabilityViolation("solve_implicit: k^alpha * L must stay below Gamma(1+alpha)");
    }
}

} // namespace

double step_constraint(double alpha, double L) {
    fracops::FractionalOrder ord(alpha);
    if (!(L > 0.0)) throw UsageError("step_constraint: L must be positive");
    return std::pow(gamma_fn(1.0 + alpha) / L, 1.0 / alpha);
}

Path solve_linear_implicit(const fracops::CoefficientTable& table, double lambda, double x0, const Grid& grid,
                           const SolverOptions&) {
    check_table(table, grid, "solve_linear_implicit");
    const double ka = std::pow(grid.k(), table.alpha);
    const double c0 = table.c[0];
    if (lambda > 0.0 && ka * lambda > 0.5 * c0)
        throw StabilityViolation("solve_linear_implicit: need k^alpha * lambda <= Gamma(1+alpha)/2");
    Path x(grid, 1);
    x.value(0) = x0;
    const double denom = c0 - ka * lambda;
    for (int n = 1; n <= grid.n_steps; ++n) {
        NeumaierSum s;
        for (int i = 1; i <= n - 1; ++i) s.add(table.c[i] * x.value(n - i));
        s.add(table.c_tail[n] * x0);
        x.value(n) = s.value() / denom;
    }
    return x;
}

Path solve_implicit(const fracops::CoefficientTable& table, const RhsFunction& f, std::span<const double> x0,
                    const Grid& grid, const SolverOptions& opts) {
    check_table(table, grid, "solve_implicit");
    if (static_cast<int>(x0.size()) != f.dim) throw LengthMismatch("solve_implicit: x0 size != rhs dim");
    check_lipschitz(table, f, grid);
    const int d = f.dim;
    const double ka = std::pow(grid.k(), table.alpha);
    Path x(grid, d);
    std::copy(x0.begin(), x0.end(), x.at(0).begin());
    std::vector<double> rhs(d);
    std::vector<NeumaierSum> acc(d);
    for (int n = 1; n <= grid.n_steps; ++n) {
        for (int i = 0; i < d; ++i) acc[i].reset();
        for (int i = 1; i <= n - 1; ++i) {
            auto xi = x.at(n - i);
            for (int c = 0; c < d; ++c) acc[c].add(table.c[i] * xi[c]);
        }
        for (int c = 0; c < d; ++c) {
            acc[c].add(table.c_tail[n] * x0[c]);
            rhs[c] = acc[c].value();
        }
        auto xn = x.at(n);
        std::copy(x.at(n - 1).begin(), x.at(n - 1).end(), xn.begin());
        solve_node(f, grid.t(n), table.c[0], ka, rhs, xn, opts);
    }
    return x;
}

Path solve_implicit_integral(const fracops::CoefficientTable& table, const RhsFunction& f, std::span<const double> x0,
                             const Grid& grid, const SolverOptions& opts) {
    check_table(table, grid, "solve_implicit_integral");
    if (static_cast<int>(x0.size()) != f.dim) throw LengthMismatch("solve_implicit_integral: x0 size != rhs dim");
    check_lipschitz(table, f, grid);
    const int d = f.dim;
    const double ka = std::pow(grid.k(), table.alpha);
    Path x(grid, d);
    std::copy(x0.begin(), x0.end(), x.at(0).begin());
    // cache f(t_m, X_m) as steps complete
    std::vector<double> fvals(static_cast<size_t>(grid.n_steps + 1) * d, 0.0);
    std::vector<double> rhs(d);
    std::vector<NeumaierSum> acc(d);
    for (int n = 1; n <= grid.n_steps; ++n) {
        for (int c = 0; c < d; ++c) acc[c].reset();
        for (int m = 1; m <= n - 1; ++m)
            for (int c = 0; c < d; ++c) acc[c].add(table.a[n - m] * fvals[static_cast<size_t>(m) * d + c]);
        for (int c = 0; c < d; ++c) rhs[c] = x0[c] + ka * acc[c].value();
        auto xn = x.at(n);
        std::copy(x.at(n - 1).begin(), x.at(n - 1).end(), xn.begin());
        solve_node(f, grid.t(n), 1.0, ka * table.a[0], rhs, xn, opts);
        f.eval(grid.t(n), xn, {fvals.data() + static_cast<size_t>(n) * d, static_cast<size_t>(d)});
    }
    return x;
}

double exact_linear_solution(double alpha, double lambda, double x0, double t, double tol) {
    if (!(t >= 0.0)) throw UsageError("exact_linear_solution: t must be nonnegative");
    return x0 * mlf::mittag_leffler(alpha, lambda * std::pow(t, alpha), tol);
}

bool comparison_check(std::span<const double> sub, std::span<const double> sol, std::span<const double> sup) {
    if (sub.size() != sol.size() || sol.size() != sup.size())
        throw LengthMismatch("comparison_check: paths differ in length");
    constexpr double slack = 1e-10;
    for (size_t n = 0; n < sol.size(); ++n) {
        if (!(sub[n] <= sol[n] + slack)) return false;
        if (!(sol[n] <= sup[n] + slack)) return false;
    }
    return true;
}

bool convex_functional_check(const fracops::CoefficientTable& table, const Path& x,
                             const std::function<double(std::span<const double>)>& E,
                             const std::function<void(std::span<const double>, std::span<double>)>& gradE) {
    const int N = x.grid.n_steps;
    if (table.n_max() < N) throw TableTooShort("convex_functional_check: table shorter than path");
    const double k = x.grid.k();
    const int d = x.dim;
    std::vector<double> evals(static_cast<size_t>(N));
    for (int n = 1; n <= N; ++n) evals[n - 1] = E(x.at(n));
    const double e0 = E(x.at(0));
    std::vector<double> dE = fracops::discrete_caputo(table, evals, e0, k);

    // componentwise Caputo of the path
    std::vector<std::vector<double>> dX(d);
    std::vector<double> comp(static_cast<size_t>(N));
    for (int c = 0; c < d; ++c) {
        for (int n = 1; n <= N; ++n) comp[n - 1] = x.at(n)[c];
        dX[c] = fracops::discrete_caputo(table, comp, x.at(0)[c], k);
    }
    std::vector<double> grad(d);
    for (int n = 1; n <= N; ++n) {
        gradE(x.at(n), grad);
        double rhs = 0.0;
        for (int c = 0; c < d; ++c) rhs += grad[c] * dX[c][n - 1];
        if (!(dE[n - 1] <= rhs + 1e-10)) return false;
    }
    return true;
}

bool step_doubling_check(double alpha, double lambda, double x0, double k, double T, const SolverOptions& opts) {
    if (!(lambda > 0.0)) throw UsageError("step_doubling_check: lambda must be positive");
    const double n_real = T / k;
    const int N = static_cast<int>(std::lround(n_real));
    if (std::abs(n_real - N) > 1e-9 * std::max(1.0, n_real) || N < 2 || N % 2 != 0)
        throw UsageError("step_doubling_check: T/k must be an even integer");
    auto table = fracops::caputo_coefficients(alpha, N);
    Path fine = solve_linear_implicit(table, lambda, x0, Grid(T, N), opts);
    Path coarse = solve_linear_implicit(table, lambda, x0, Grid(T, N / 2), opts);
    for (int m = 1; m <= N; ++m) {
        const double vc = coarse.value((m + 1) / 2);
        if (!(vc >= fine.value(m) - 1e-12)) return false;
    }
    return true;
}

double observed_order(std::span<const double> ks, std::span<const double> errs) {
    if (ks.size() != errs.size()) throw LengthMismatch("observed_order: size mismatch");
    if (ks.size() < 2) throw UsageError("observed_order: need at least two levels");
    for (size_t i = 0; i < ks.size(); ++i) {
        if (!(ks[i] > 0.0) || !(errs[i] > 0.0)) throw UsageError("observed_order: need positive steps and errors");
        if (i > 0 && !(ks[i] < ks[i - 1])) throw UsageError("observed_order: steps must decrease");
    }
    const size_t n = ks.size();
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += std::log(ks[i]);
        my += std::log(errs[i]);
    }
    mx /= n;
    my /= n;
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = std::log(ks[i]) - mx;
        num += dx * (std::log(errs[i]) - my);
        den += dx * dx;
    }
    return num / den;
}

} // namespace fraclab::fode
