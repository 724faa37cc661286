#include "fraclab/fbm.hpp"
#include "fraclab/kahan.hpp"
#include "fraclab/rng.hpp"

#include <algorithm>
#include <cmath>

namespace fraclab::fbm {

double fbm_covariance(double H, double s, double t) {
    HurstParameter h(H);
    if (!(s >= 0.0) || !(t >= 0.0)) throw UsageError("fbm_covariance: times must be nonnegative");
    return 0.5 * (std::pow(s, 2 * H) + std::pow(t, 2 * H) - std::pow(std::abs(t - s), 2 * H));
}

std::vector<double> fgn_covariance(double H, double k, int n) {
    HurstParameter h(H);
    if (!(k > 0.0)) throw UsageError("fgn_covariance: step must be positive");
    if (n < 1) throw UsageError("fgn_covariance: need at least one lag");
    const double k2h = std::pow(k, 2 * H);
    std::vector<double> g(static_cast<size_t>(n));
    g[0] = k2h;
    for (int j = 1; j < n; ++j)
        g[j] = 0.5 * k2h * (std::pow(j + 1.0, 2 * H) - 2.0 * std::pow(static_cast<double>(j), 2 * H) +
                            std::pow(j - 1.0, 2 * H));
    return g;
}

void fft_pow2(std::vector<std::complex<double>>& v) {
    const size_t n = v.size();
    if (n == 0 || (n & (n - 1)) != 0) throw UsageError("fft_pow2: size must be a power of two");
    // bit-reversal permutation
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(v[i], v[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = v[i + j];
                const std::complex<double> t = w * v[i + j + len / 2];
                v[i + j] = u + t;
                v[i + j + len / 2] = u - t;
                w *= wl;
            }
        }
    }
}

namespace {
size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}
} // namespace

Sampler::Sampler(double H, const Grid& grid, bool force_cholesky) : grid_(grid), hurst_(HurstParameter(H).H) {
    const int N = grid.n_steps;
    const std::vector<double> g = fgn_covariance(H, grid.k(), N + 1); // lags 0..N

    if (!force_cholesky) {
        // first row of the circulant: gamma(0..M2), then mirrored tail
        const size_t M2 = next_pow2(static_cast<size_t>(N));
        const size_t M = 2 * M2;
        std::vector<double> row(M);
        std::vector<double> gl = fgn_covariance(H, grid.k(), static_cast<int>(M2) + 1);
        for (size_t j = 0; j <= M2; ++j) row[j] = gl[j];
        for (size_t j = 1; j < M2; ++j) row[M - j] = gl[j];
        std::vector<std::complex<double>> f(M);
        for (size_t j = 0; j < M; ++j) f[j] = row[j];
        fft_pow2(f);
        double max_ev = 0.0, min_ev = 0.0;
        for (auto& z : f) {
            max_ev = std::max(max_ev, z.real());
            min_ev = std::min(min_ev, z.real());
        }
        if (min_ev >= -1e-9 * max_ev) {
            spec_half_.resize(M2 + 1);
            for (size_t j = 0; j <= M2; ++j)
                spec_half_[j] = std::sqrt(std::max(f[j].real(), 0.0) / static_cast<double>(M));
            return;
        }
        // fall through to Cholesky
    }

    cholesky_ = true;
    if (N > 4096) throw EmbeddingFailure("fbm::Sampler: embedding failed and Cholesky fallback too large");
    // Cholesky of the Toeplitz covariance of the N increments
    chol_.assign(static_cast<size_t>(N) * N, 0.0);
    auto L = [&](int i, int j) -> double& { return chol_[static_cast<size_t>(i) * N + j]; };
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j <= i; ++j) {
            NeumaierSum s;
            s.add(g[static_cast<size_t>(std::abs(i - j))]);
            for (int p = 0; p < j; ++p) s.add(-L(i, p) * L(j, p));
            const double v = s.value();
            if (i == j) {
                if (!(v > 0.0)) throw EmbeddingFailure("fbm::Sampler: increment covariance not positive definite");
                L(i, j) = std::sqrt(v);
            } else {
                L(i, j) = v / L(j, j);
            }
        }
    }
}

Path Sampler::sample(uint64_t master, uint64_t stream) const {
    const int N = grid_.n_steps;
    CounterRng rng(master, stream);
    std::vector<double> incr(static_cast<size_t>(N));

    if (!cholesky_) {
        const size_t M2 = spec_half_.size() - 1;
        const size_t M = 2 * M2;
        std::vector<std::complex<double>> z(M);
        z[0] = spec_half_[0] * rng.next_gaussian();
        z[M2] = spec_half_[M2] * rng.next_gaussian();
        const double r2 = 1.0 / std::sqrt(2.0);
        for (size_t j = 1; j < M2; ++j) {
            const double a = rng.next_gaussian();
            const double b = rng.next_gaussian();
            const std::complex<double> w(a * r2, b * r2);
            z[j] = spec_half_[j] * w;
            z[M - j] = spec_half_[j] * std::conj(w);
        }
        fft_pow2(z);
        for (int m = 0; m < N; ++m) incr[m] = z[m].real();
    } else {
        std::vector<double> gauss(static_cast<size_t>(N));
        for (int i = 0; i < N; ++i) gauss[i] = rng.next_gaussian();
        for (int i = 0; i < N; ++i) {
            NeumaierSum s;
            for (int j = 0; j <= i; ++j) s.add(chol_[static_cast<size_t>(i) * N + j] * gauss[j]);
            incr[i] = s.value();
        }
    }

    Path b(grid_, 1);
    NeumaierSum run;
    b.value(0) = 0.0;
    for (int m = 1; m <= N; ++m) {
        run.add(incr[m - 1]);
        b.value(m) = run.value();
    }
    return b;
}

Path sample_fbm(double H, const Grid& grid, uint64_t master, uint64_t stream) {
    return Sampler(H, grid).sample(master, stream);
}

} // namespace fraclab::fbm
