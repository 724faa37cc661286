#include "fraclab/fsde.hpp"
#include "fraclab/gamma.hpp"
#include "fraclab/kahan.hpp"
#include "fraclab/mlf.hpp"
#include "fraclab/quad.hpp"
#include "fraclab/threads.hpp"
#include "implicit_node.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace fraclab::fsde {

namespace {

constexpr std::uint64_t kInitStreamBit = std::uint64_t{1} << 63;
constexpr int kChunk = 128; // fixed accumulation granularity, never tied to thread count

double phi1(const Potential& V, double x) { return V.phi({&x, 1}); }

void check_drift(const Potential& V, double alpha, double k, double c0) {
    if (V.lipschitz_L && *V.lipschitz_L > 0.0) {
        if (std::pow(k, alpha) * *V.lipschitz_L >= c0)
            throw StabilityViolation("solve_fsde: k^alpha * L must stay below Gamma(1+alpha)");
    }
}

// G[n] = sigma k^{alpha-1} sum_{m=1}^n a[n-m] dB[m]: the exactly integrated
// kernel against piecewise-constant increment densities.
void general_from_increments(std::span<const double> aw, double sigma, double k, double alpha,
                             std::span<const double> incr, std::span<double> g) {
    const int N = static_cast<int>(incr.size());
    const double pref = sigma * std::pow(k, alpha - 1.0);
    g[0] = 0.0;
    for (int n = 1; n <= N; ++n) {
        NeumaierSum s;
        for (int m = 1; m <= n; ++m) s.add(aw[n - m] * incr[m - 1]);
        g[n] = pref * s.value();
    }
}

struct NoiseBuilder {
    const NoiseSpec& spec;
    const fbm::Sampler& sampler; // Hurst 1-H in physical mode, H in general mode
    std::vector<double> aw;      // general mode only
    double beta = 0.0;           // physical mode only

    NoiseBuilder(const NoiseSpec& s, const fbm::Sampler& smp, int n_steps) : spec(s), sampler(smp) {
        if (spec.mode == NoiseMode::physical) {
            beta = fdt_beta(spec.hurst);
        } else {
            aw = fracops::integral_weights(spec.alpha, n_steps);
        }
    }

    // fills one scalar component of g (stride = dim)
    void component(std::uint64_t master, std::uint64_t stream, double* g, int stride, int N, double k,
                   std::vector<double>& incr_buf) const {
        Path b = sampler.sample(master, stream);
        if (spec.mode == NoiseMode::physical) {
            for (int n = 0; n <= N; ++n) g[static_cast<size_t>(n) * stride] = beta * b.value(n);
        } else {
            incr_buf.resize(static_cast<size_t>(N));
            for (int m = 1; m <= N; ++m) incr_buf[m - 1] = b.value(m) - b.value(m - 1);
            const double pref = spec.sigma * std::pow(k, spec.alpha - 1.0);
            g[0] = 0.0;
            for (int n = 1; n <= N; ++n) {
                NeumaierSum s;
                for (int m = 1; m <= n; ++m) s.add(aw[n - m] * incr_buf[m - 1]);
                g[static_cast<size_t>(n) * stride] = pref * s.value();
            }
        }
    }
};

int node_of_time(double t, const Grid& grid) {
    const double T = grid.T;
    if (t < -1e-9 * std::max(1.0, T) || t > T * (1.0 + 1e-9) + 1e-12)
        throw UsageError("histogram time outside the grid");
    int n = static_cast<int>(std::lround(t / grid.k()));
    return std::clamp(n, 0, grid.n_steps);
}

} // namespace

Potential make_quadratic(double mu) {
    if (!(mu > 0.0)) throw UsageError("make_quadratic: mu must be positive");
    Potential V;
    V.dim = 1;
    V.phi = [mu](std::span<const double> x) { return 0.5 * mu * x[0] * x[0]; };
    V.grad = [mu](std::span<const double> x, std::span<double> g) { g[0] = mu * x[0]; };
    V.mu = mu;
    V.lipschitz_L = mu;
    V.name = "quadratic";
    return V;
}

Potential make_quartic() {
    Potential V;
    V.dim = 1;
    V.phi = [](std::span<const double> x) { return 0.25 * x[0] * x[0] * x[0] * x[0]; };
    V.grad = [](std::span<const double> x, std::span<double> g) { g[0] = x[0] * x[0] * x[0]; };
    V.mu = 0.0; // convex but not strongly convex
    V.name = "quartic";
    return V;
}

Potential make_quadratic_plus_quartic(double mu) {
    if (!(mu > 0.0)) throw UsageError("make_quadratic_plus_quartic: mu must be positive");
    Potential V;
    V.dim = 1;
    V.phi = [mu](std::span<const double> x) {
        const double x2 = x[0] * x[0];
        return 0.5 * mu * x2 + 0.25 * x2 * x2;
    };
    V.grad = [mu](std::span<const double> x, std::span<double> g) { g[0] = mu * x[0] + x[0] * x[0] * x[0]; };
    V.mu = mu;
    V.name = "quadratic+quartic";
    return V;
}

Potential make_poly(std::span<const double> coeffs) {
    if (coeffs.empty()) throw UsageError("make_poly: need at least one coefficient");
    std::vector<double> c(coeffs.begin(), coeffs.end());
    Potential V;
    V.dim = 1;
    V.phi = [c](std::span<const double> x) {
        double acc = 0.0;
        for (size_t p = c.size(); p-- > 0;) acc = acc * x[0] + c[p];
        return acc;
    };
    V.grad = [c](std::span<const double> x, std::span<double> g) {
        double acc = 0.0;
        for (size_t p = c.size(); p-- > 1;) acc = acc * x[0] + static_cast<double>(p) * c[p];
        g[0] = acc;
    };
    V.name = "poly";
    return V;
}

bool monotonicity_audit(const Potential& V, int n_probes, std::uint64_t seed, double radius) {
    if (n_probes <= 0) throw UsageError("monotonicity_audit: need n_probes > 0");
    if (!(radius > 0.0)) throw UsageError("monotonicity_audit: need radius > 0");
    if (!V.mu || !(*V.mu > 0.0)) return true; // nothing claimed, nothing to audit
    const int d = V.dim;
    const double mu = *V.mu;
    CounterRng rng(seed, 0);
    std::vector<double> x(d), y(d), gx(d), gy(d);
    for (int p = 0; p < n_probes; ++p) {
        for (int i = 0; i < d; ++i) x[i] = (2.0 * rng.next_unit() - 1.0) * radius;
        for (int i = 0; i < d; ++i) y[i] = (2.0 * rng.next_unit() - 1.0) * radius;
        V.grad(x, gx);
        V.grad(y, gy);
        double lhs = 0.0, dist2 = 0.0;
        for (int i = 0; i < d; ++i) {
            const double dz = x[i] - y[i];
            lhs += dz * (gx[i] - gy[i]);
            dist2 += dz * dz;
        }
        if (lhs < mu * dist2 - 1e-10 * std::max(1.0, mu * dist2)) return false;
    }
    return true;
}

double fdt_sigma(double H) {
    fbm::HurstParameter h(H);
    return std::sqrt(2.0 / gamma_fn(2.0 * H + 1.0));
}

double fdt_beta(double H) {
    fbm::HurstParameter h(H);
    return std::sqrt(2.0 / gamma_fn(3.0 - 2.0 * H));
}

NoiseSpec physical_noise(double H) {
    NoiseSpec spec;
    spec.mode = NoiseMode::physical;
    spec.hurst = H;
    spec.alpha = 2.0 - 2.0 * H;
    spec.sigma = fdt_sigma(H);
    validate(spec);
    return spec;
}

NoiseSpec general_noise(double alpha, double sigma, double H) {
    NoiseSpec spec;
    spec.mode = NoiseMode::general;
    spec.hurst = H;
    spec.alpha = alpha;
    spec.sigma = sigma;
    validate(spec);
    return spec;
}

void validate(const NoiseSpec& spec) {
    fbm::HurstParameter h(spec.hurst);
    if (!(spec.sigma > 0.0)) throw UsageError("NoiseSpec: sigma must be positive");
    if (spec.mode == NoiseMode::physical && spec.hurst < 0.5)
        throw ModeMismatch("NoiseSpec: physical mode needs H >= 1/2 so that 2-2H lies in (0,1]");
    fracops::FractionalOrder ord(spec.alpha);
    if (spec.mode == NoiseMode::physical) {
        if (std::abs(spec.alpha - (2.0 - 2.0 * spec.hurst)) > 1e-12)
            throw ModeMismatch("NoiseSpec: physical mode requires alpha = 2 - 2H");
        if (std::abs(spec.sigma - fdt_sigma(spec.hurst)) > 1e-9)
            throw ModeMismatch("NoiseSpec: physical mode requires sigma = sqrt(2/Gamma(2H+1))");
    }
}

Path noise_from_fbm_physical(double H, const Path& fbm_one_minus_h) {
    if (fbm_one_minus_h.dim != 1) throw UsageError("noise_from_fbm_physical: scalar path expected");
    const double beta = fdt_beta(H);
    Path g = fbm_one_minus_h;
    for (double& v : g.data) v *= beta;
    return g;
}

Path noise_from_fbm_general(double alpha, double sigma, const Path& fbm_h) {
    if (fbm_h.dim != 1) throw UsageError("noise_from_fbm_general: scalar path expected");
    fracops::FractionalOrder ord(alpha);
    if (!(sigma > 0.0)) throw UsageError("noise_from_fbm_general: sigma must be positive");
    const int N = fbm_h.grid.n_steps;
    const auto aw = fracops::integral_weights(alpha, N);
    std::vector<double> incr(static_cast<size_t>(N));
    for (int m = 1; m <= N; ++m) incr[m - 1] = fbm_h.value(m) - fbm_h.value(m - 1);
    Path g(fbm_h.grid, 1);
    general_from_increments(aw, sigma, fbm_h.grid.k(), alpha, incr, g.data);
    return g;
}

Path noise_path_physical(double H, const Grid& grid, std::uint64_t master, std::uint64_t stream) {
    NoiseSpec spec = physical_noise(H);
    return noise_path(spec, grid, master, stream);
}

Path noise_path_general(double alpha, double sigma, double H, const Grid& grid, std::uint64_t master,
                        std::uint64_t stream) {
    NoiseSpec spec = general_noise(alpha, sigma, H);
    return noise_path(spec, grid, master, stream);
}

Path noise_path(const NoiseSpec& spec, const Grid& grid, std::uint64_t master, std::uint64_t stream) {
    validate(spec);
    if (spec.mode == NoiseMode::physical) {
        fbm::Sampler sampler(1.0 - spec.hurst, grid);
        return noise_from_fbm_physical(spec.hurst, sampler.sample(master, stream));
    }
    fbm::Sampler sampler(spec.hurst, grid);
    return noise_from_fbm_general(spec.alpha, spec.sigma, sampler.sample(master, stream));
}

Path solve_fsde(const fracops::CoefficientTable& table, const Potential& V, std::span<const double> x0,
                const Path& noise, const fode::SolverOptions& opts) {
    const Grid& grid = noise.grid;
    const int d = V.dim;
    if (noise.dim != d) throw LengthMismatch("solve_fsde: noise dimension != potential dimension");
    if (static_cast<int>(x0.size()) != d) throw LengthMismatch("solve_fsde: x0 size != potential dimension");
    const int N = grid.n_steps;
    if (table.n_max() < N) throw TableTooShort("solve_fsde: table shorter than grid");
    const double k = grid.k();
    check_drift(V, table.alpha, k, table.c[0]);
    const double ka = std::pow(k, table.alpha);

    std::vector<double> gbuf(d);
    detail::EvalFn drift = [&](std::span<const double> xv, std::span<double> out) {
        V.grad(xv, gbuf);
        for (int i = 0; i < d; ++i) out[i] = -gbuf[i];
    };

    Path x(grid, d);
    for (int c = 0; c < d; ++c) x.at(0)[c] = x0[c] + noise.at(0)[c];
    std::vector<double> bvals(static_cast<size_t>(N + 1) * d, 0.0);
    std::vector<double> rhs(d);
    std::vector<NeumaierSum> acc(d);
    for (int n = 1; n <= N; ++n) {
        for (int c = 0; c < d; ++c) acc[c].reset();
        for (int m = 1; m <= n - 1; ++m) {
            const double w = table.a[n - m];
            const double* bm = bvals.data() + static_cast<size_t>(m) * d;
            for (int c = 0; c < d; ++c) acc[c].add(w * bm[c]);
        }
        auto gn = noise.at(n);
        auto gp = noise.at(n - 1);
        for (int c = 0; c < d; ++c) rhs[c] = x0[c] + ka * acc[c].value() + gn[c];
        auto xn = x.at(n);
        auto xp = x.at(n - 1);
        for (int c = 0; c < d; ++c) xn[c] = xp[c] + (gn[c] - gp[c]);
        detail::solve_node(drift, {}, d, 1.0, ka * table.a[0], rhs, xn, opts);
        drift(xn, {bvals.data() + static_cast<size_t>(n) * d, static_cast<size_t>(d)});
    }
    return x;
}

InitSampler fixed_init(std::vector<double> x0) {
    return [x0 = std::move(x0)](CounterRng&, std::span<double> out) {
        if (out.size() != x0.size()) throw LengthMismatch("fixed_init: dimension mismatch");
        std::copy(x0.begin(), x0.end(), out.begin());
    };
}

EnsembleResult ensemble(const fracops::CoefficientTable& table, const Potential& V, const InitSampler& init,
                        const NoiseSpec& noise, const Grid& grid, int n_samples, std::uint64_t master_seed,
                        std::span<const double> histogram_times, const EnsembleOptions& opts) {
    validate(noise);
    if (n_samples < 2) throw UsageError("ensemble: need n_samples >= 2");
    if (std::abs(noise.alpha - table.alpha) > 1e-12)
        throw ModeMismatch("ensemble: table order differs from noise order");
    if (table.n_max() < grid.n_steps) throw TableTooShort("ensemble: table shorter than grid");
    if (opts.bins < 1) throw UsageError("ensemble: need at least one histogram bin");
    if (!(opts.hist_hi > opts.hist_lo)) throw UsageError("ensemble: histogram range is empty");

    const int N = grid.n_steps;
    const int d = V.dim;
    const double hurst_used = noise.mode == NoiseMode::physical ? 1.0 - noise.hurst : noise.hurst;
    const fbm::Sampler sampler(hurst_used, grid);
    const NoiseBuilder builder(noise, sampler, N);

    std::vector<int> hist_nodes;
    hist_nodes.reserve(histogram_times.size());
    for (double t : histogram_times) hist_nodes.push_back(node_of_time(t, grid));
    const int n_hist = static_cast<int>(hist_nodes.size());

    EnsembleResult out;
    out.grid = grid;
    out.n_samples = n_samples;
    out.master_seed = master_seed;
    out.mean_sq.assign(static_cast<size_t>(N + 1), 0.0);
    out.stderr_mean_sq.assign(static_cast<size_t>(N + 1), 0.0);
    if (opts.keep_samples)
        out.samples_at.assign(static_cast<size_t>(n_hist), std::vector<double>(static_cast<size_t>(n_samples)));

    const int n_chunks = (n_samples + kChunk - 1) / kChunk;
    std::vector<std::vector<double>> part_sq(static_cast<size_t>(n_chunks));
    std::vector<std::vector<double>> part_q4(static_cast<size_t>(n_chunks));
    std::vector<std::vector<std::vector<long>>> part_hist(static_cast<size_t>(n_chunks));

    const double bin_w = (opts.hist_hi - opts.hist_lo) / opts.bins;

    auto chunk_work = [&](int c) {
        const int lo = c * kChunk;
        const int hi = std::min(n_samples, lo + kChunk);
        std::vector<NeumaierSum> ssq(static_cast<size_t>(N + 1)), sq4(static_cast<size_t>(N + 1));
        std::vector<std::vector<long>> hist(static_cast<size_t>(n_hist),
                                            std::vector<long>(static_cast<size_t>(opts.bins), 0));
        Path g(grid, d);
        std::vector<double> x0(d), incr_buf;
        for (int p = lo; p < hi; ++p) {
            for (int comp = 0; comp < d; ++comp)
                builder.component(master_seed, static_cast<std::uint64_t>(p) * d + comp, g.data.data() + comp, d,
                                  N, grid.k(), incr_buf);
            CounterRng init_rng(master_seed, kInitStreamBit | static_cast<std::uint64_t>(p));
            init(init_rng, x0);
            Path x = solve_fsde(table, V, x0, g, opts.solver);
            for (int n = 0; n <= N; ++n) {
                double v = 0.0;
                for (int comp = 0; comp < d; ++comp) {
                    const double xc = x.at(n)[comp];
                    v += xc * xc;
                }
                ssq[n].add(v);
                sq4[n].add(v * v);
            }
            for (int ti = 0; ti < n_hist; ++ti) {
                const double xv = x.at(hist_nodes[ti])[0];
                int bin = static_cast<int>(std::floor((xv - opts.hist_lo) / bin_w));
                bin = std::clamp(bin, 0, opts.bins - 1);
                ++hist[ti][bin];
                if (opts.keep_samples) out.samples_at[ti][p] = xv;
            }
        }
        auto& psq = part_sq[c];
        auto& pq4 = part_q4[c];
        psq.resize(static_cast<size_t>(N + 1));
        pq4.resize(static_cast<size_t>(N + 1));
        for (int n = 0; n <= N; ++n) {
            psq[n] = ssq[n].value();
            pq4[n] = sq4[n].value();
        }
        part_hist[c] = std::move(hist);
    };
    detail::parallel_chunks(n_chunks, thread_count(opts.threads), chunk_work);

    for (int n = 0; n <= N; ++n) {
        NeumaierSum tsq, tq4;
        for (int c = 0; c < n_chunks; ++c) {
            tsq.add(part_sq[c][n]);
            tq4.add(part_q4[c][n]);
        }
        const double mean = tsq.value() / n_samples;
        const double var = std::max(0.0, (tq4.value() - n_samples * mean * mean) / (n_samples - 1));
        out.mean_sq[n] = mean;
        out.stderr_mean_sq[n] = std::sqrt(var / n_samples);
    }

    out.histograms.resize(static_cast<size_t>(n_hist));
    for (int ti = 0; ti < n_hist; ++ti) {
        Histogram& h = out.histograms[ti];
        h.node = hist_nodes[ti];
        h.time = grid.t(h.node);
        h.edges.resize(static_cast<size_t>(opts.bins) + 1);
        for (int b = 0; b <= opts.bins; ++b)
            h.edges[b] = opts.hist_lo + (opts.hist_hi - opts.hist_lo) * b / opts.bins;
        h.mass.assign(static_cast<size_t>(opts.bins), 0.0);
        for (int b = 0; b < opts.bins; ++b) {
            long count = 0;
            for (int c = 0; c < n_chunks; ++c) count += part_hist[c][ti][b];
            h.mass[b] = static_cast<double>(count) / n_samples;
        }
    }
    return out;
}

std::pair<Path, Path> coupled_pair(const fracops::CoefficientTable& table, const Potential& V,
                                   std::span<const double> x0_a, std::span<const double> x0_b,
                                   const NoiseSpec& noise, const Grid& grid, std::uint64_t master,
                                   std::uint64_t stream, const fode::SolverOptions& opts) {
    validate(noise);
    if (std::abs(noise.alpha - table.alpha) > 1e-12)
        throw ModeMismatch("coupled_pair: table order differs from noise order");
    const int d = V.dim;
    const int N = grid.n_steps;
    const double hurst_used = noise.mode == NoiseMode::physical ? 1.0 - noise.hurst : noise.hurst;
    const fbm::Sampler sampler(hurst_used, grid);
    const NoiseBuilder builder(noise, sampler, N);
    Path g(grid, d);
    std::vector<double> incr_buf;
    for (int comp = 0; comp < d; ++comp)
        builder.component(master, stream * static_cast<std::uint64_t>(d) + comp, g.data.data() + comp, d, N,
                          grid.k(), incr_buf);
    Path a = solve_fsde(table, V, x0_a, g, opts);
    Path b = solve_fsde(table, V, x0_b, g, opts);
    return {std::move(a), std::move(b)};
}

ContractionResult contraction_experiment(const fracops::CoefficientTable& table, const Potential& V,
                                         const InitSampler& init_a, const InitSampler& init_b,
                                         const NoiseSpec& noise, const Grid& grid, int n_samples,
                                         std::uint64_t master_seed, const EnsembleOptions& opts) {
    validate(noise);
    if (!V.mu || !(*V.mu > 0.0)) throw UsageError("contraction_experiment: potential needs mu > 0");
    if (n_samples < 2) throw UsageError("contraction_experiment: need n_samples >= 2");
    if (std::abs(noise.alpha - table.alpha) > 1e-12)
        throw ModeMismatch("contraction_experiment: table order differs from noise order");
    if (table.n_max() < grid.n_steps) throw TableTooShort("contraction_experiment: table shorter than grid");

    const int N = grid.n_steps;
    const int d = V.dim;
    const double hurst_used = noise.mode == NoiseMode::physical ? 1.0 - noise.hurst : noise.hurst;
    const fbm::Sampler sampler(hurst_used, grid);
    const NoiseBuilder builder(noise, sampler, N);

    const int n_chunks = (n_samples + kChunk - 1) / kChunk;
    std::vector<std::vector<double>> part_sq(static_cast<size_t>(n_chunks));
    std::vector<std::vector<double>> part_q4(static_cast<size_t>(n_chunks));

    auto chunk_work = [&](int c) {
        const int lo = c * kChunk;
        const int hi = std::min(n_samples, lo + kChunk);
        std::vector<NeumaierSum> ssq(static_cast<size_t>(N + 1)), sq4(static_cast<size_t>(N + 1));
        Path g(grid, d);
        std::vector<double> xa(d), xb(d), incr_buf;
        for (int p = lo; p < hi; ++p) {
            for (int comp = 0; comp < d; ++comp)
                builder.component(master_seed, static_cast<std::uint64_t>(p) * d + comp, g.data.data() + comp, d,
                                  N, grid.k(), incr_buf);
            CounterRng rng_a(master_seed, kInitStreamBit | (2 * static_cast<std::uint64_t>(p)));
            CounterRng rng_b(master_seed, kInitStreamBit | (2 * static_cast<std::uint64_t>(p) + 1));
            init_a(rng_a, xa);
            init_b(rng_b, xb);
            Path pa = solve_fsde(table, V, xa, g, opts.solver);
            Path pb = solve_fsde(table, V, xb, g, opts.solver);
            for (int n = 0; n <= N; ++n) {
                double z2 = 0.0;
                for (int comp = 0; comp < d; ++comp) {
                    const double dz = pa.at(n)[comp] - pb.at(n)[comp];
                    z2 += dz * dz;
                }
                ssq[n].add(z2);
                sq4[n].add(z2 * z2);
            }
        }
        auto& psq = part_sq[c];
        auto& pq4 = part_q4[c];
        psq.resize(static_cast<size_t>(N + 1));
        pq4.resize(static_cast<size_t>(N + 1));
        for (int n = 0; n <= N; ++n) {
            psq[n] = ssq[n].value();
            pq4[n] = sq4[n].value();
        }
    };
    detail::parallel_chunks(n_chunks, thread_count(opts.threads), chunk_work);

    ContractionResult out;
    out.grid = grid;
    out.n_samples = n_samples;
    out.master_seed = master_seed;
    out.rows.resize(static_cast<size_t>(N + 1));
    for (int n = 0; n <= N; ++n) {
        NeumaierSum tsq, tq4;
        for (int c = 0; c < n_chunks; ++c) {
            tsq.add(part_sq[c][n]);
            tq4.add(part_q4[c][n]);
        }
        const double mean = tsq.value() / n_samples;
        const double var = std::max(0.0, (tq4.value() - n_samples * mean * mean) / (n_samples - 1));
        out.rows[n].t = grid.t(n);
        out.rows[n].mean_sq = mean;
        out.rows[n].err = std::sqrt(var / n_samples);
    }
    const double u0 = out.rows[0].mean_sq;
    const double mu = *V.mu;
    for (int n = 0; n <= N; ++n) {
        out.rows[n].bound = u0 * mlf::decay_bound(table.alpha, mu, grid.t(n));
        out.rows[n].flagged = out.rows[n].mean_sq > out.rows[n].bound + 3.0 * out.rows[n].err + 1e-8;
        if (out.rows[n].flagged) ++out.n_flagged;
    }
    return out;
}

double wasserstein2_1d(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw UsageError("wasserstein2_1d: need nonempty samples");
    std::vector<double> as(a.begin(), a.end()), bs(b.begin(), b.end());
    std::sort(as.begin(), as.end());
    std::sort(bs.begin(), bs.end());
    const size_t n = as.size(), m = bs.size();
    NeumaierSum s;
    if (n == m) {
        for (size_t i = 0; i < n; ++i) {
            const double dd = as[i] - bs[i];
            s.add(dd * dd);
        }
        return std::sqrt(std::max(0.0, s.value() / static_cast<double>(n)));
    }
    // piecewise-constant quantile functions: integrate over merged breakpoints
    size_t i = 1, j = 1;
    double q_prev = 0.0;
    while (i <= n && j <= m) {
        const unsigned long long qi = static_cast<unsigned long long>(i) * m;
        const unsigned long long qj = static_cast<unsigned long long>(j) * n;
        const double q = qi <= qj ? static_cast<double>(i) / static_cast<double>(n)
                                  : static_cast<double>(j) / static_cast<double>(m);
        const double dd = as[i - 1] - bs[j - 1];
        s.add(dd * dd * (q - q_prev));
        q_prev = q;
        if (qi <= qj) ++i;
        if (qj <= qi) ++j;
    }
    return std::sqrt(std::max(0.0, s.value()));
}

double gibbs_moment(const Potential& V, int p, double tol) {
    if (V.dim != 1) throw UsageError("gibbs_moment: needs a 1-D potential");
    if (p < 0 || p % 2 != 0) throw UsageError("gibbs_moment: p must be an even nonnegative integer");
    if (!(tol > 0.0)) throw UsageError("gibbs_moment: tol must be positive");
    if (p == 0) return 1.0;

    // locate the well and a truncation radius with e^{-750} tail density
    double vmin = std::numeric_limits<double>::infinity(), xmin = 0.0;
    auto scan = [&](double R, int pts) {
        for (int i = 0; i <= pts; ++i) {
            const double x = -R + 2.0 * R * i / pts;
            const double v = phi1(V, x);
            if (v < vmin) {
                vmin = v;
                xmin = x;
            }
        }
    };
    scan(4.0, 512);
    double R = 4.0;
    for (int round = 0; round < 2; ++round) {
        while (phi1(V, R) - vmin < 750.0 || phi1(V, -R) - vmin < 750.0) {
            R *= 2.0;
            if (R > 1e8) throw NotConverged("gibbs_moment: exp(-V) decays too slowly to truncate");
        }
        scan(R, 2048);
    }

    std::vector<double> pts = {-R, xmin - 8.0, xmin - 1.0, xmin, xmin + 1.0, xmin + 8.0, R};
    for (double& x : pts) x = std::clamp(x, -R, R);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    auto piecewise = [&](const std::function<double(double)>& f, double abs_tol) {
        NeumaierSum acc;
        const double per = abs_tol / static_cast<double>(pts.size() - 1);
        for (size_t ii = 0; ii + 1 < pts.size(); ++ii)
            if (pts[ii + 1] > pts[ii]) acc.add(integrate_adaptive(f, pts[ii], pts[ii + 1], per).value);
        return acc.value();
    };

    auto dens = [&](double x) { return std::exp(-(phi1(V, x) - vmin)); };
    auto mom = [&](double x) { return std::pow(x, p) * std::exp(-(phi1(V, x) - vmin)); };
    const double z0_rough = piecewise(dens, 1e-3);
    if (!(z0_rough > 0.0)) throw NotConverged("gibbs_moment: vanishing normalization");
    const double z0 = piecewise(dens, tol * z0_rough);
    const double zp = piecewise(mom, tol * z0_rough);
    return zp / z0;
}

GibbsSampler1D::GibbsSampler1D(const Potential& V, double x_lo, double x_hi, int n_cells) {
    if (V.dim != 1) throw UsageError("GibbsSampler1D: needs a 1-D potential");
    if (!(x_hi > x_lo)) throw UsageError("GibbsSampler1D: need x_hi > x_lo");
    if (n_cells < 8) throw UsageError("GibbsSampler1D: need at least 8 cells");
    lo_ = x_lo;
    h_ = (x_hi - x_lo) / n_cells;
    // shift by the minimum over nodes and midpoints so exp() stays in range
    double vmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 2 * n_cells; ++i) {
        const double x = x_lo + 0.5 * h_ * i;
        vmin = std::min(vmin, phi1(V, x));
    }
    auto dens = [&](double x) { return std::exp(-(phi1(V, x) - vmin)); };
    cdf_.resize(static_cast<size_t>(n_cells) + 1);
    cdf_[0] = 0.0;
    NeumaierSum run;
    for (int i = 0; i < n_cells; ++i) {
        const double a = x_lo + h_ * i;
        run.add(h_ / 6.0 * (dens(a) + 4.0 * dens(a + 0.5 * h_) + dens(a + h_)));
        cdf_[static_cast<size_t>(i) + 1] = run.value();
    }
    const double total = cdf_.back();
    if (!(total > 0.0)) throw NotConverged("GibbsSampler1D: vanishing mass on the window");
    for (double& v : cdf_) v /= total;
    cdf_.back() = 1.0;
}

double GibbsSampler1D::quantile(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.begin()) return lo_;
    const size_t idx = static_cast<size_t>(it - cdf_.begin());
    const double c0 = cdf_[idx - 1], c1 = cdf_[idx];
    const double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
    return lo_ + h_ * (static_cast<double>(idx - 1) + frac);
}

std::vector<double> GibbsSampler1D::draw(int n, std::uint64_t master, std::uint64_t stream) const {
    if (n <= 0) throw UsageError("GibbsSampler1D::draw: need n > 0");
    CounterRng rng(master, stream);
    std::vector<double> out(static_cast<size_t>(n));
    for (double& v : out) v = quantile(rng.next_unit());
    return out;
}

} // namespace fraclab::fsde
