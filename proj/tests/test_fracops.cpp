#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "fraclab/fracops.hpp"

#include "fraclab/gamma.hpp"
#include "fraclab/kahan.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace fraclab;

TEST_CASE("quadrature weights match the closed form") {
    const auto table = fracops::caputo_coefficients(0.5, 32);
    const double g = gamma_fn(1.5);
    for (int n = 0; n <= 32; ++n)
        CHECK(table.a[n] ==
              doctest::Approx((std::pow(n + 1.0, 0.5) - std::pow(double(n), 0.5)) / g).epsilon(1e-14));
    CHECK(table.a[0] * table.c[0] == doctest::Approx(1.0).epsilon(1e-14)); // a0 = 1/Gamma(1+a) * 1, c0 = Gamma(1+a)
}

TEST_CASE("deconvolution inverts the weights") {
    for (double alpha : {0.3, 0.5, 0.8, 1.0}) {
        const int n_max = 512;
        const auto table = fracops::caputo_coefficients(alpha, n_max);
        for (int n = 0; n <= n_max; ++n) {
            NeumaierSum conv;
            for (int i = 0; i <= n; ++i) conv.add(table.a[i] * table.a_inv[n - i]);
            CHECK(std::abs(conv.value() - (n == 0 ? 1.0 : 0.0)) < 1e-12);
        }
        CHECK(std::abs(table.c[0] - gamma_fn(1.0 + alpha)) < 1e-12);
        if (alpha < 1.0) {
            // strict positivity degenerates at alpha = 1 (c[i >= 2] = 0)
            for (int i = 0; i <= n_max; ++i) CHECK(table.c[i] > 0.0);
            for (int i = 1; i <= n_max; ++i) CHECK(table.a_inv[i] < 0.0);
        } else {
            CHECK(table.c[1] == doctest::Approx(1.0).epsilon(1e-14));
            for (int i = 2; i <= n_max; ++i) CHECK(std::abs(table.c[i]) < 1e-13);
        }
    }
}

TEST_CASE("tail weights telescope and stay positive") {
    const auto table = fracops::caputo_coefficients(0.7, 256);
    double run = table.c[0];
    for (int n = 1; n <= 256; ++n) {
        CHECK(table.c_tail[n] == doctest::Approx(run).epsilon(1e-13));
        CHECK(table.c_tail[n] > 0.0);
        run -= table.c[n];
    }
    // alpha = 1 collapses to the backward difference: c_tail[n] = 0 for n >= 2
    const auto one = fracops::caputo_coefficients(1.0, 16);
    CHECK(one.c_tail[1] == doctest::Approx(1.0).epsilon(1e-14));
    for (int n = 2; n <= 16; ++n) CHECK(std::abs(one.c_tail[n]) < 1e-13);
}

TEST_CASE("finite-depth monotonicity of the weights") {
    for (double alpha : {0.3, 0.5, 0.8}) {
        const auto table = fracops::caputo_coefficients(alpha, 2048);
        CHECK(fracops::check_complete_monotone(table.a, 12));
        CHECK(fracops::check_complete_monotone(std::span(table.c).subspan(1), 8));
    }
    const std::vector<double> not_cm{1.0, 0.2, 0.5, 0.1};
    CHECK_FALSE(fracops::check_complete_monotone(not_cm, 2));
}

TEST_CASE("coefficient asymptotics at large index") {
    const int idx = 10000;
    for (double alpha : {0.4, 0.6}) {
        const auto table = fracops::caputo_coefficients(alpha, idx);
        const double c_limit = -1.0 / gamma_fn(-alpha);
        const double tail_limit = 1.0 / gamma_fn(1.0 - alpha);
        CHECK(table.c[idx] * std::pow(idx, 1.0 + alpha) == doctest::Approx(c_limit).epsilon(0.02));
        CHECK(table.c_tail[idx] * std::pow(idx, alpha) == doctest::Approx(tail_limit).epsilon(0.02));
    }
}

TEST_CASE("derivative of a constant vanishes") {
    const auto table = fracops::caputo_coefficients(0.6, 64);
    const std::vector<double> flat(64, 3.25);
    const auto d = fracops::discrete_caputo(table, flat, 3.25, 0.05);
    for (double v : d) CHECK(std::abs(v) < 1e-11);
}

TEST_CASE("integral then derivative returns the source") {
    const auto table = fracops::caputo_coefficients(0.45, 48);
    const double k = 0.125;
    std::vector<double> f(48);
    for (int n = 0; n < 48; ++n) f[n] = std::sin(0.3 * (n + 1)) + 0.2 * (n + 1);
    const auto j = fracops::discrete_frac_integral(table, f, k);
    const auto d = fracops::discrete_caputo(table, j, 0.0, k);
    for (int n = 0; n < 48; ++n) CHECK(d[n] == doctest::Approx(f[n]).epsilon(1e-11));
}

TEST_CASE("classical first-difference limit") {
    // alpha = 1: D[n] = (x_n - x_{n-1}) / k exactly
    const auto table = fracops::caputo_coefficients(1.0, 16);
    const double k = 0.25;
    std::vector<double> x(16);
    for (int n = 0; n < 16; ++n) x[n] = std::cos(0.4 * (n + 1));
    const auto d = fracops::discrete_caputo(table, x, 1.0, k);
    CHECK(d[0] == doctest::Approx((x[0] - 1.0) / k).epsilon(1e-12));
    for (int n = 1; n < 16; ++n) CHECK(d[n] == doctest::Approx((x[n] - x[n - 1]) / k).epsilon(1e-10));
}

TEST_CASE("generating functions multiply to one") {
    const auto table = fracops::caputo_coefficients(0.35, 4096);
    for (double z : {0.2, 0.5, 0.9}) {
        const double ga = fracops::generating_partial(table.a, z, 4096);
        const double gb = fracops::generating_partial(table.a_inv, z, 4096);
        CHECK(ga * gb == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("l1 scheme coefficients") {
    const double alpha = 0.5;
    const auto l1 = fracops::l1_coefficients(alpha, 64);
    const double g2 = gamma_fn(2.0 - alpha);
    CHECK(l1.cbar[0] * g2 == doctest::Approx(1.0).epsilon(1e-13));
    for (int j = 1; j < 64; ++j) {
        const double expect =
            -(std::pow(j + 1.0, 1 - alpha) - 2.0 * std::pow(double(j), 1 - alpha) + std::pow(j - 1.0, 1 - alpha));
        CHECK(l1.cbar[j] * g2 == doctest::Approx(expect).epsilon(1e-12));
        CHECK(l1.cbar[j] > 0.0);
    }
    for (int n = 1; n <= 64; ++n)
        CHECK(l1.cbar_tail[n] * g2 ==
              doctest::Approx(std::pow(double(n), 1 - alpha) - std::pow(n - 1.0, 1 - alpha)).epsilon(1e-12));
}

TEST_CASE("both discretizations agree on a smooth path") {
    // D^alpha t at t_n has the closed form t^{1-alpha}/Gamma(2-alpha); the
    // deconvolution and L1 discretizations must both approach it.
    const double alpha = 0.5;
    const int N = 512;
    const double k = 1.0 / N;
    const auto table = fracops::caputo_coefficients(alpha, N);
    std::vector<double> x(N);
    for (int n = 0; n < N; ++n) x[n] = (n + 1) * k;
    const auto d = fracops::discrete_caputo(table, x, 0.0, k);
    const double t = 1.0;
    const double exact = std::pow(t, 1.0 - alpha) / gamma_fn(2.0 - alpha);
    CHECK(d[N - 1] == doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(fracops::caputo_coefficients(0.0, 8), UsageError);
    CHECK_THROWS_AS(fracops::caputo_coefficients(1.2, 8), UsageError);
    CHECK_THROWS_AS(fracops::caputo_coefficients(0.5, -1), UsageError);
    CHECK_THROWS_AS(fracops::FractionalOrder(-0.1), InvalidOrder);
    const std::vector<double> empty;
    CHECK_THROWS_AS(fracops::convolution_inverse(empty, 4), UsageError);
    const std::vector<double> zero_lead{0.0, 1.0};
    CHECK_THROWS_AS(fracops::convolution_inverse(zero_lead, 1), ZeroLeadingCoefficient);
}
