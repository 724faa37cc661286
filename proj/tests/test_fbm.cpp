#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "fraclab/fbm.hpp"

#include "fraclab/kahan.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace fraclab;

TEST_CASE("covariance kernel identities") {
    for (double H : {0.3, 0.5, 0.8}) {
        CHECK(fbm::fbm_covariance(H, 0.0, 1.0) == 0.0);
        CHECK(fbm::fbm_covariance(H, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(fbm::fbm_covariance(H, 2.0, 3.0) == doctest::Approx(fbm::fbm_covariance(H, 3.0, 2.0)).epsilon(1e-14));
        CHECK(fbm::fbm_covariance(H, 0.7, 0.7) == doctest::Approx(std::pow(0.7, 2.0 * H)).epsilon(1e-14));
    }
    // Brownian case: Cov(s, t) = min(s, t)
    CHECK(fbm::fbm_covariance(0.5, 0.4, 1.7) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(fbm::fbm_covariance(0.5, 2.5, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("increment covariances") {
    const double H = 0.7, k = 0.25;
    const auto g = fbm::fgn_covariance(H, k, 6);
    CHECK(g[0] == doctest::Approx(std::pow(k, 2.0 * H)).epsilon(1e-14));
    for (int j = 1; j < 6; ++j) {
        const double expect = std::pow(k, 2.0 * H) *
                              (std::pow(j + 1.0, 2.0 * H) - 2.0 * std::pow(j, 2.0 * H) + std::pow(j - 1.0, 2.0 * H)) /
                              2.0;
        CHECK(g[j] == doctest::Approx(expect).epsilon(1e-13));
    }
    // independent increments at H = 1/2
    const auto brown = fbm::fgn_covariance(0.5, 0.125, 5);
    CHECK(brown[0] == doctest::Approx(0.125).epsilon(1e-14));
    for (int j = 1; j < 5; ++j) CHECK(std::abs(brown[j]) < 1e-15);
}

TEST_CASE("sampler starts at zero and is reproducible") {
    Grid grid(1.0, 64);
    const fbm::Sampler s(0.7, grid);
    const Path a = s.sample(42, 3);
    const Path b = s.sample(42, 3);
    const Path c = s.sample(42, 4);
    const Path d = s.sample(43, 3);
    CHECK(a.value(0) == 0.0);
    bool identical = true, stream_differs = false, master_differs = false;
    for (int n = 0; n <= 64; ++n) {
        identical = identical && a.value(n) == b.value(n);
        stream_differs = stream_differs || a.value(n) != c.value(n);
        master_differs = master_differs || a.value(n) != d.value(n);
    }
    CHECK(identical);
    CHECK(stream_differs);
    CHECK(master_differs);
}

TEST_CASE("circulant embedding stays positive for common roughness") {
    Grid grid(1.0, 256);
    for (double H : {0.3, 0.5, 0.8}) {
        const fbm::Sampler s(H, grid);
        CHECK_FALSE(s.used_cholesky());
    }
}

TEST_CASE("empirical law matches the kernel") {
    const int n_paths = 4000;
    Grid grid(2.0, 64);
    for (double H : {0.35, 0.5, 0.75}) {
        const fbm::Sampler s(H, grid);
        // moments of (B(1), B(2)) across paths
        NeumaierSum v1, v2, cross;
        for (int p = 0; p < n_paths; ++p) {
            const Path path = s.sample(9001, static_cast<uint64_t>(p));
            const double x = path.value(32), y = path.value(64);
            v1.add(x * x);
            v2.add(y * y);
            cross.add(x * y);
        }
        const double var1 = v1.value() / n_paths;
        const double var2 = v2.value() / n_paths;
        const double cov = cross.value() / n_paths;
        // Var of a second-moment estimator of N(0, s^2) is 2 s^4 / n: 5 sigma gates
        const double t1 = fbm::fbm_covariance(H, 1.0, 1.0), t2 = fbm::fbm_covariance(H, 2.0, 2.0);
        CHECK(std::abs(var1 - t1) < 5.0 * t1 * std::sqrt(2.0 / n_paths));
        CHECK(std::abs(var2 - t2) < 5.0 * t2 * std::sqrt(2.0 / n_paths));
        const double tc = fbm::fbm_covariance(H, 1.0, 2.0);
        CHECK(std::abs(cov - tc) < 5.0 * std::sqrt((t1 * t2 + tc * tc) / n_paths));
    }
}

TEST_CASE("cholesky fallback agrees with the embedding in law") {
    const int n_paths = 4000;
    Grid grid(1.0, 32);
    const fbm::Sampler fast(0.6, grid);
    const fbm::Sampler slow(0.6, grid, true);
    CHECK(slow.used_cholesky());
    NeumaierSum va, vb;
    for (int p = 0; p < n_paths; ++p) {
        const double x = fast.sample(7, static_cast<uint64_t>(p)).value(32);
        const double y = slow.sample(7, static_cast<uint64_t>(p)).value(32);
        va.add(x * x);
        vb.add(y * y);
    }
    const double t = fbm::fbm_covariance(0.6, 1.0, 1.0);
    CHECK(std::abs(va.value() / n_paths - t) < 5.0 * t * std::sqrt(2.0 / n_paths));
    CHECK(std::abs(vb.value() / n_paths - t) < 5.0 * t * std::sqrt(2.0 / n_paths));
}

TEST_CASE("one-shot wrapper") {
    Grid grid(1.0, 16);
    const Path p = fbm::sample_fbm(0.5, grid, 11, 0);
    const fbm::Sampler s(0.5, grid);
    const Path q = s.sample(11, 0);
    for (int n = 0; n <= 16; ++n) CHECK(p.value(n) == q.value(n));
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(fbm::HurstParameter(0.0), InvalidHurst);
    CHECK_THROWS_AS(fbm::HurstParameter(1.0), InvalidHurst);
    CHECK_THROWS_AS(fbm::HurstParameter(-0.2), InvalidHurst);
    Grid grid(1.0, 8);
    CHECK_THROWS_AS(fbm::Sampler(1.3, grid), InvalidHurst);
    CHECK_THROWS_AS(fbm::fgn_covariance(0.5, -1.0, 4), UsageError);
    std::vector<std::complex<double>> odd(5);
    CHECK_THROWS_AS(fbm::fft_pow2(odd), UsageError);
}
