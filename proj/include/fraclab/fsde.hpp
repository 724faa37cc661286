#pragma once
// Overdamped fractional Langevin dynamics: memory-kernel noise built on fBm,
// the implicit integral-form scheme, Monte Carlo ensembles, and the
// synchronization-coupling contraction experiment.
#include "fraclab/fbm.hpp"
#include "fraclab/fode.hpp"
#include "fraclab/fracops.hpp"
#include "fraclab/grid.hpp"
#include "fraclab/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fraclab::fsde {

// Energy landscape; the drift is b = -grad. phi/grad must be pure (they are
// called concurrently from worker threads).
struct Potential {
    int dim = 1;
    std::function<double(std::span<const double>)> phi;
    std::function<void(std::span<const double>, std::span<double>)> grad;
    std::optional<double> mu;          // strong-convexity modulus, when known
    std::optional<double> lipschitz_L; // Lipschitz constant of the drift, when known
    std::string name = "custom";
};

Potential make_quadratic(double mu);                 // mu x^2 / 2
Potential make_quartic();                            // x^4 / 4
Potential make_quadratic_plus_quartic(double mu);    // mu x^2 / 2 + x^4 / 4
Potential make_poly(std::span<const double> coeffs); // sum_p coeffs[p] x^p

// Randomized spot-check of (x-y).(grad(x)-grad(y)) >= mu |x-y|^2 on uniform
// probes in [-radius, radius]^dim. Vacuously true when mu is absent or zero.
bool monotonicity_audit(const Potential& V, int n_probes, std::uint64_t seed, double radius = 2.0);

enum class NoiseMode { physical, general };

// physical: (alpha, sigma) pinned to (2-2H, sqrt(2/Gamma(2H+1))), so the
// memory integral has the law of beta_H * fBm(1-H) and is sampled that way.
// general: any (alpha, sigma, H); the kernel is integrated exactly against
// piecewise-constant increment densities.
struct NoiseSpec {
    NoiseMode mode = NoiseMode::physical;
    double hurst = 0.5;
    double sigma = 1.0;
    double alpha = 1.0;
};

double fdt_sigma(double H); // sqrt(2/Gamma(2H+1))
double fdt_beta(double H);  // sqrt(2/Gamma(3-2H))
NoiseSpec physical_noise(double H);
NoiseSpec general_noise(double alpha, double sigma, double H);
void validate(const NoiseSpec& spec); // ModeMismatch / InvalidHurst / InvalidOrder

// Transforms of an already-sampled fBm path on the target grid (used to keep
// refinement studies on a single underlying noise realization).
Path noise_from_fbm_physical(double H, const Path& fbm_one_minus_h);
Path noise_from_fbm_general(double alpha, double sigma, const Path& fbm_h);

Path noise_path_physical(double H, const Grid& grid, std::uint64_t master, std::uint64_t stream);
Path noise_path_general(double alpha, double sigma, double H, const Grid& grid, std::uint64_t master,
                        std::uint64_t stream);
Path noise_path(const NoiseSpec& spec, const Grid& grid, std::uint64_t master, std::uint64_t stream);

// X[n] = x0 + k^alpha sum_{m<=n} a[n-m] b(X[m]) + G[n], solved per node by
// Newton seeded with X[n-1] + (G[n] - G[n-1]). The grid is the noise path's.
Path solve_fsde(const fracops::CoefficientTable& table, const Potential& V, std::span<const double> x0,
                const Path& noise, const fode::SolverOptions& opts = {});

struct Histogram {
    double time = 0.0;
    int node = 0;
    std::vector<double> edges; // bins + 1
    std::vector<double> mass;  // bins, sums to 1
};

struct EnsembleResult {
    Grid grid{1.0, 1};
    int n_samples = 0;
    std::uint64_t master_seed = 0;
    std::vector<double> mean_sq;        // E|X_n|^2, nodes 0..N
    std::vector<double> stderr_mean_sq; // sample std of |X_n|^2 / sqrt(n_samples)
    std::vector<Histogram> histograms;  // first component, at requested times
    std::vector<std::vector<double>> samples_at; // first component, one vector per histogram time
};

// Draws the initial state; called once per path with that path's own stream.
using InitSampler = std::function<void(CounterRng&, std::span<double>)>;
InitSampler fixed_init(std::vector<double> x0);

struct EnsembleOptions {
    int bins = 61;
    double hist_lo = -3.0;
    double hist_hi = 3.0;
    int threads = 0;       // <= 0: hardware (always capped by FRACLAB_THREADS)
    bool keep_samples = true;
    fode::SolverOptions solver{};
};

// Path i uses noise streams i*dim+c and init stream (1<<63)|i, so results are
// reproducible from master_seed and independent of scheduling. Statistics are
// accumulated in fixed 128-path chunks merged in chunk order (bit-stable).
EnsembleResult ensemble(const fracops::CoefficientTable& table, const Potential& V, const InitSampler& init,
                        const NoiseSpec& noise, const Grid& grid, int n_samples, std::uint64_t master_seed,
                        std::span<const double> histogram_times, const EnsembleOptions& opts = {});

// Two solutions driven by the identical noise realization.
std::pair<Path, Path> coupled_pair(const fracops::CoefficientTable& table, const Potential& V,
                                   std::span<const double> x0_a, std::span<const double> x0_b,
                                   const NoiseSpec& noise, const Grid& grid, std::uint64_t master,
                                   std::uint64_t stream, const fode::SolverOptions& opts = {});

struct ContractionRow {
    double t = 0.0;
    double mean_sq = 0.0; // empirical E|Z_n|^2
    double err = 0.0;     // stderr of the mean square
    double bound = 0.0;   // E|Z_0|^2 * E_alpha(-2 mu t^alpha)
    bool flagged = false; // mean_sq > bound + 3 err + 1e-8
};

struct ContractionResult {
    Grid grid{1.0, 1};
    int n_samples = 0;
    std::uint64_t master_seed = 0;
    std::vector<ContractionRow> rows; // nodes 0..N
    int n_flagged = 0;
};

ContractionResult contraction_experiment(const fracops::CoefficientTable& table, const Potential& V,
                                         const InitSampler& init_a, const InitSampler& init_b,
                                         const NoiseSpec& noise, const Grid& grid, int n_samples,
                                         std::uint64_t master_seed, const EnsembleOptions& opts = {});

// Exact 1-D optimal coupling: L2 distance of empirical quantile functions
// (matched order statistics when sizes agree).
double wasserstein2_1d(std::span<const double> a, std::span<const double> b);

// integral x^p exp(-V) / integral exp(-V) over the line, p even.
double gibbs_moment(const Potential& V, int p, double tol = 1e-10);

// Tabulated inverse CDF of exp(-V) restricted to [lo, hi]; per-cell Simpson.
class GibbsSampler1D {
  public:
    GibbsSampler1D(const Potential& V, double x_lo, double x_hi, int n_cells = 4096);
    double quantile(double u) const;
    std::vector<double> draw(int n, std::uint64_t master, std::uint64_t stream) const;

  private:
    double lo_;
    double h_;
    std::vector<double> cdf_;
};

} // namespace fraclab::fsde
