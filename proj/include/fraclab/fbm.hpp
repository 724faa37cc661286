#pragma once
#include "fraclab/errors.hpp"
#include "fraclab/grid.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace fraclab::fbm {

struct HurstParameter {
    double H;
    explicit HurstParameter(double h) : H(h) {
        if (!(h > 0.0) || !(h < 1.0)) throw InvalidHurst("HurstParameter: H must lie in (0, 1)");
    }
};

// Cov(B_H(s), B_H(t)) = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2
double fbm_covariance(double H, double s, double t);

// Stationary increment covariances on step k:
//   gamma(j) = k^{2H} (|j+1|^{2H} - 2|j|^{2H} + |j-1|^{2H}) / 2,  j = 0..n-1
std::vector<double> fgn_covariance(double H, double k, int n);

// In-place forward radix-2 FFT, size must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& v);

// Exact fractional Gaussian noise sampler: circulant embedding of the
// increment covariance (eigenvalues via one FFT at construction), Cholesky
// fallback if the embedding produces eigenvalues below -1e-9 * max.
// sample() is const and thread-safe; identical (master, stream) keys give
// bit-identical paths.
class Sampler {
  public:
    Sampler(double H, const Grid& grid, bool force_cholesky = false);
    Path sample(uint64_t master, uint64_t stream) const;
    bool used_cholesky() const { return cholesky_; }
    const Grid& grid() const { return grid_; }

  private:
    Grid grid_;
    double hurst_;
    bool cholesky_ = false;
    std::vector<double> spec_half_; // sqrt(lambda_j / M), j = 0..M/2
    std::vector<double> chol_;      // row-major lower triangle when cholesky_
};

// One-shot convenience wrapper.
Path sample_fbm(double H, const Grid& grid, uint64_t master, uint64_t stream);

} // namespace fraclab::fbm
