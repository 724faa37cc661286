#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "fraclab/gradflow.hpp"

#include "fraclab/fode.hpp"
#include "fraclab/mlf.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace fraclab;

namespace {

gradflow::ProxOperator prox_quad_plus_quartic(double mu) {
    return gradflow::prox_smooth(
        1, [mu](std::span<const double> u) { return 0.5 * mu * u[0] * u[0] + 0.25 * u[0] * u[0] * u[0] * u[0]; },
        [mu](std::span<const double> u, std::span<double> g) { g[0] = mu * u[0] + u[0] * u[0] * u[0]; }, mu);
}

} // namespace

TEST_CASE("proximal map identities") {
    double out = 0.0;
    const auto quad = gradflow::prox_quadratic(2.0);
    const std::vector<double> w{1.2};
    quad.prox(w, 0.5, std::span(&out, 1));
    CHECK(out == doctest::Approx(1.2 / 2.0).epsilon(1e-14)); // w / (1 + tau mu)
    CHECK(quad.phi(w) == doctest::Approx(1.44).epsilon(1e-14));

    const auto l1 = gradflow::prox_l1();
    const std::vector<double> ws{1.5, -0.2, -2.0};
    std::vector<double> outs(3);
    l1.prox(ws, 0.4, outs);
    CHECK(outs[0] == doctest::Approx(1.1).epsilon(1e-14));
    CHECK(outs[1] == 0.0);
    CHECK(outs[2] == doctest::Approx(-1.6).epsilon(1e-14));
    CHECK(l1.phi(ws) == doctest::Approx(3.7).epsilon(1e-14));

    const auto box = gradflow::prox_box(-1.0, 1.0);
    const std::vector<double> wb{2.0, -3.0, 0.3};
    std::vector<double> outb(3);
    box.prox(wb, 7.0, outb);
    CHECK(outb[0] == 1.0);
    CHECK(outb[1] == -1.0);
    CHECK(outb[2] == 0.3);
    CHECK(box.phi(outb) == 0.0);

    const auto quartic = gradflow::prox_quartic();
    const double w4 = 2.0;
    quartic.prox(std::span(&w4, 1), 1.0, std::span(&out, 1));
    CHECK(out == doctest::Approx(1.0).epsilon(1e-12)); // u + u^3 = 2

    const auto huber = gradflow::prox_huber(1.0);
    const double wc = 0.9, wt = 3.0;
    huber.prox(std::span(&wc, 1), 0.5, std::span(&out, 1));
    CHECK(out == doctest::Approx(0.6).epsilon(1e-13)); // quadratic core: w/(1+tau)
    huber.prox(std::span(&wt, 1), 0.5, std::span(&out, 1));
    CHECK(out == doctest::Approx(2.5).epsilon(1e-13)); // linear tail: w - tau delta

    CHECK_THROWS_AS(gradflow::prox_quadratic(0.0), UsageError);
    CHECK_THROWS_AS(gradflow::prox_box(1.0, -1.0), UsageError);
    CHECK_THROWS_AS(gradflow::prox_huber(0.0), UsageError);
    CHECK_THROWS_AS(gradflow::prox_smooth(0, nullptr, nullptr), UsageError);
}

TEST_CASE("smooth prox solves the implicit gradient system") {
    // phi = u . A u / 2 on R^3, A symmetric positive definite
    const double A[3][3] = {{2.0, 0.3, 0.0}, {0.3, 1.5, 0.2}, {0.0, 0.2, 1.0}};
    auto phi = [&A](std::span<const double> u) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) s += u[i] * A[i][j] * u[j];
        return 0.5 * s;
    };
    auto grad = [&A](std::span<const double> u, std::span<double> g) {
        for (int i = 0; i < 3; ++i) {
            g[i] = 0.0;
            for (int j = 0; j < 3; ++j) g[i] += A[i][j] * u[j];
        }
    };
    const auto prox = gradflow::prox_smooth(3, phi, grad, 0.9);
    const double tau = 0.7;
    const std::vector<double> w{1.0, -0.5, 2.0};
    std::vector<double> u(3);
    prox.prox(w, tau, u);
    // direct elimination on (I + tau A) u = w
    double M[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) M[i][j] = (i == j ? 1.0 : 0.0) + tau * A[i][j];
        M[i][3] = w[i];
    }
    for (int c = 0; c < 3; ++c)
        for (int r = c + 1; r < 3; ++r) {
            const double f = M[r][c] / M[c][c];
            for (int j = c; j < 4; ++j) M[r][j] -= f * M[c][j];
        }
    double ref[3];
    for (int r = 2; r >= 0; --r) {
        ref[r] = M[r][3];
        for (int j = r + 1; j < 3; ++j) ref[r] -= M[r][j] * ref[j];
        ref[r] /= M[r][r];
    }
    for (int i = 0; i < 3; ++i) CHECK(u[i] == doctest::Approx(ref[i]).epsilon(1e-9));
}

TEST_CASE("quadratic energies reproduce the implicit linear scheme") {
    const int N = 256;
    Grid grid(2.0, N);
    const auto table = fracops::caputo_coefficients(0.6, N);
    const auto st = gradflow::solve_gradflow(table, gradflow::prox_quadratic(1.5), std::vector<double>{1.0}, grid);
    const Path lin = fode::solve_linear_implicit(table, -1.5, 1.0, grid);
    for (int n = 0; n <= N; ++n) CHECK(std::abs(st.u.value(n) - lin.value(n)) < 1e-12);
}

TEST_CASE("trajectories converge to the decaying oracle") {
    std::vector<double> ks, errs;
    for (int N : {32, 64, 128, 256, 512}) {
        Grid grid(1.0, N);
        const auto table = fracops::caputo_coefficients(0.6, N);
        const auto st =
            gradflow::solve_gradflow(table, gradflow::prox_quadratic(1.0), std::vector<double>{1.0}, grid);
        double sup = 0.0;
        for (int n = 0; n <= N; ++n)
            sup = std::max(sup, std::abs(st.u.value(n) - fode::exact_linear_solution(0.6, -1.0, 1.0, grid.t(n))));
        ks.push_back(grid.k());
        errs.push_back(sup);
    }
    CHECK(fode::observed_order(ks, errs) >= 0.5);
}

TEST_CASE("interpolant and slope bookkeeping") {
    const int N = 64;
    Grid grid(1.0, N);
    const auto table = fracops::caputo_coefficients(0.7, N);
    const auto st = gradflow::solve_gradflow(table, gradflow::prox_l1(), std::vector<double>{1.0}, grid);
    for (int n = 0; n <= N; ++n) {
        const auto v = gradflow::interpolate_continuous(st, grid.t(n));
        CHECK(std::abs(v[0] - st.u.value(n)) < 1e-10);
    }
    // xi is the negative discrete derivative of the solution
    std::vector<double> vals(N);
    for (int n = 1; n <= N; ++n) vals[n - 1] = st.u.value(n);
    const auto dc = fracops::discrete_caputo(table, vals, st.u.value(0), grid.k());
    for (int n = 1; n <= N; ++n) CHECK(std::abs(dc[n - 1] + st.xi_at(n)[0]) < 1e-9);
    CHECK_THROWS_AS(gradflow::interpolate_continuous(st, -0.1), UsageError);
    CHECK_THROWS_AS(gradflow::interpolate_continuous(st, 1.1), UsageError);
}

TEST_CASE("energy dissipates along discrete flows") {
    const int N = 128;
    Grid grid(1.0, N);
    const auto table = fracops::caputo_coefficients(0.5, N);
    const auto quad = gradflow::solve_gradflow(table, gradflow::prox_quadratic(1.0), std::vector<double>{1.0}, grid);
    CHECK(gradflow::dissipation_check(quad));
    const auto l1 = gradflow::solve_gradflow(table, gradflow::prox_l1(), std::vector<double>{1.0}, grid);
    CHECK(gradflow::dissipation_check(l1));
    const auto quartic = gradflow::solve_gradflow(table, gradflow::prox_quartic(), std::vector<double>{1.5}, grid);
    CHECK(gradflow::dissipation_check(quartic));
    // inflated slopes overstate the dissipation integral and must be caught
    auto bad = quad;
    for (double& x : bad.xi) x *= 10.0;
    CHECK_FALSE(gradflow::dissipation_check(bad));
}

TEST_CASE("path regularity matches the memory exponent") {
    const int N = 256;
    Grid grid(1.0, N);
    const auto table = fracops::caputo_coefficients(0.6, N);
    const std::vector<double> lags{1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8};
    const auto quad = gradflow::solve_gradflow(table, gradflow::prox_quadratic(1.0), std::vector<double>{1.0}, grid);
    CHECK(gradflow::holder_exponent(quad, lags) >= 0.25);
    const auto l1 = gradflow::solve_gradflow(table, gradflow::prox_l1(), std::vector<double>{1.0}, grid);
    CHECK(gradflow::holder_exponent(l1, lags) >= 0.25);
    // a feasible start inside the box never moves: flat paths report +inf
    const auto flat = gradflow::solve_gradflow(table, gradflow::prox_box(-2.0, 2.0), std::vector<double>{1.0}, grid);
    CHECK(std::isinf(gradflow::holder_exponent(flat, lags)));
    const std::vector<double> one_lag{0.1};
    CHECK_THROWS_AS(gradflow::holder_exponent(quad, one_lag), UsageError);
    const std::vector<double> too_long{0.1, 0.5};
    CHECK_THROWS_AS(gradflow::holder_exponent(quad, too_long), UsageError);
}

TEST_CASE("energy decay tracks the relaxation envelope") {
    {
        const int N = 256;
        Grid grid(1.0, N);
        const auto table = fracops::caputo_coefficients(0.5, N);
        const auto st =
            gradflow::solve_gradflow(table, gradflow::prox_quadratic(1.0), std::vector<double>{1.0}, grid);
        CHECK(gradflow::decay_check(st, std::vector<double>{0.0}, 0.0));
    }
    {
        const int N = 256;
        Grid grid(2.0, N);
        const auto table = fracops::caputo_coefficients(0.7, N);
        const auto st = gradflow::solve_gradflow(table, prox_quad_plus_quartic(1.0), std::vector<double>{2.0}, grid);
        CHECK(gradflow::decay_check(st, std::vector<double>{0.0}, 0.0));
        CHECK_THROWS_AS(gradflow::decay_check(st, std::vector<double>{0.0}, 3.0), UsageError);
        CHECK_THROWS_AS(gradflow::decay_check(st, std::vector<double>{0.0, 0.0}, 0.0), LengthMismatch);
    }
    {
        const int N = 32;
        Grid grid(1.0, N);
        const auto table = fracops::caputo_coefficients(0.5, N);
        const auto st = gradflow::solve_gradflow(table, gradflow::prox_l1(), std::vector<double>{1.0}, grid);
        CHECK_THROWS_AS(gradflow::decay_check(st, std::vector<double>{0.0}, 0.0), UsageError); // no modulus
    }
}

TEST_CASE("refining the step halves the defect") {
    const auto prox = gradflow::prox_quadratic(1.0);
    const std::vector<double> u0{1.0};
    std::vector<double> ks, sups;
    for (int m = 4; m <= 8; ++m) {
        ks.push_back(1.0 / std::exp2(m));
        sups.push_back(gradflow::two_step_comparison(0.6, prox, u0, ks.back(), 1.0));
    }
    CHECK(sups.front() == doctest::Approx(0.007305).epsilon(1e-3));
    CHECK(sups.back() == doctest::Approx(0.000431).epsilon(2e-3));
    CHECK(fode::observed_order(ks, sups) >= 0.15);
    for (size_t i = 1; i < sups.size(); ++i) CHECK(sups[i] / sups[i - 1] <= std::exp2(-0.6 / 4) * 1.2);
    double prev = 1e300;
    for (int m = 4; m <= 7; ++m) {
        const double s = gradflow::two_step_comparison(0.6, gradflow::prox_l1(), u0, 1.0 / std::exp2(m), 1.0);
        CHECK(s < prev);
        prev = s;
    }
    CHECK_THROWS_AS(gradflow::two_step_comparison(0.6, prox, u0, 0.3, 1.0), UsageError);
}

TEST_CASE("minimizers are fixed points") {
    const int N = 32;
    Grid grid(1.0, N);
    const auto table = fracops::caputo_coefficients(0.8, N);
    const auto st = gradflow::solve_gradflow(table, gradflow::prox_quartic(), std::vector<double>{0.0}, grid);
    for (int n = 0; n <= N; ++n) CHECK(st.u.value(n) == 0.0);
}

TEST_CASE("two flows never spread apart") {
    const int N = 128;
    Grid grid(1.0, N);
    const auto table = fracops::caputo_coefficients(0.6, N);
    const auto a = gradflow::solve_gradflow(table, gradflow::prox_l1(), std::vector<double>{1.3}, grid);
    const auto b = gradflow::solve_gradflow(table, gradflow::prox_l1(), std::vector<double>{-0.4}, grid);
    for (int n = 0; n <= N; ++n) CHECK(std::abs(a.u.value(n) - b.u.value(n)) <= 1.7 + 1e-8);
}

TEST_CASE("single steps and their guards") {
    const int N = 8;
    Grid grid(1.0, N);
    const auto table = fracops::caputo_coefficients(0.5, N);
    const auto prox = gradflow::prox_quadratic(1.0);
    const auto st = gradflow::solve_gradflow(table, prox, std::vector<double>{1.0}, grid);
    Path u(grid, 1);
    u.value(0) = 1.0;
    double xi = 0.0;
    gradflow::degiorgi_step(table, prox, u, 1, std::span(&xi, 1));
    CHECK(u.value(1) == doctest::Approx(st.u.value(1)).epsilon(1e-14));
    CHECK(xi == doctest::Approx(st.xi_at(1)[0]).epsilon(1e-12));
    CHECK_THROWS_AS(gradflow::degiorgi_step(table, prox, u, 0), UsageError);
    CHECK_THROWS_AS(gradflow::degiorgi_step(table, prox, u, N + 1), UsageError);
    const auto short_table = fracops::caputo_coefficients(0.5, 2);
    CHECK_THROWS_AS(gradflow::degiorgi_step(short_table, prox, u, 5), TableTooShort);
    std::vector<double> wide(2);
    CHECK_THROWS_AS(gradflow::degiorgi_step(table, prox, u, 1, wide), LengthMismatch);
    CHECK_THROWS_AS(gradflow::solve_gradflow(short_table, prox, std::vector<double>{1.0}, grid), TableTooShort);
    CHECK_THROWS_AS(gradflow::solve_gradflow(table, prox, std::vector<double>{}, grid), UsageError);
}
