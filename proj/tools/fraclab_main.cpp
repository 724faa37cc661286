// fraclab command line: experiment drivers over the library modules.
// Exit codes: 0 ok, 1 acceptance-criterion failure, 2 usage/config error,
// 3 numerical failure.
#include "fraclab/acceptance.hpp"
#include "fraclab/config.hpp"
#include "fraclab/emit.hpp"
#include "fraclab/fbm.hpp"
#include "fraclab/fode.hpp"
#include "fraclab/fracops.hpp"
#include "fraclab/fsde.hpp"
#include "fraclab/gradflow.hpp"
#include "fraclab/mlf.hpp"
#include "fraclab/threads.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace {

using namespace fraclab;

int steps_from(const config::RunConfig& cfg) {
    if (cfg.n > 0) return cfg.n;
    if (cfg.k > 0.0) {
        const double r = cfg.T / cfg.k;
        const int n = static_cast<int>(std::lround(r));
        if (n < 1 || std::abs(r - n) > 1e-9 * std::max(1.0, r))
            throw UsageError("step k must divide the horizon T evenly");
        return n;
    }
    throw UsageError("give either --n or --k");
}

fsde::Potential parse_potential(const std::string& s, double mu) {
    if (s == "quartic") return fsde::make_quartic();
    if (s == "quadratic") return fsde::make_quadratic(mu);
    if (s == "quadratic+quartic") return fsde::make_quadratic_plus_quartic(mu);
    if (s.rfind("poly:", 0) == 0) {
        std::vector<double> coeffs;
        std::string rest = s.substr(5);
        size_t pos = 0;
        while (pos < rest.size()) {
            size_t used = 0;
            coeffs.push_back(std::stod(rest.substr(pos), &used));
            pos += used;
            if (pos < rest.size() && rest[pos] == ',') ++pos;
        }
        if (coeffs.empty()) throw UsageError("poly: needs at least one coefficient");
        return fsde::make_poly(coeffs);
    }
    throw UsageError("unknown potential '" + s + "' (quartic | quadratic | quadratic+quartic | poly:c0,c1,...)");
}

fsde::NoiseSpec noise_for(const config::RunConfig& cfg) {
    if (std::abs(cfg.alpha - (2.0 - 2.0 * cfg.hurst)) <= 1e-12) return fsde::physical_noise(cfg.hurst);
    return fsde::general_noise(cfg.alpha, fsde::fdt_sigma(cfg.hurst), cfg.hurst);
}

void write_manifest(const config::RunConfig& cfg, const std::string& path) {
    config::RunManifest m;
    m.config = cfg;
    m.seeds_used.push_back(cfg.seed);
    emit::write_file(path, config::to_json(m));
}

int cmd_coeffs(const config::RunConfig& cfg) {
    const auto table = fracops::caputo_coefficients(cfg.alpha, cfg.n_max);
    emit::Table out({"n", "a", "a_inv", "c", "c_tail"});
    for (int n = 0; n <= cfg.n_max; ++n)
        out.add_row({double(n), table.a[n], table.a_inv[n], table.c[n], n >= 1 ? table.c_tail[n] : 0.0});
    if (cfg.out.empty())
        std::fputs(emit::to_csv(out).c_str(), stdout);
    else
        emit::emit(out, emit::Format::csv, cfg.out);
    return 0;
}

int cmd_mlf(const config::RunConfig& cfg) {
    std::printf("%.12g\n", mlf::mittag_leffler(cfg.alpha, cfg.z));
    return 0;
}

int cmd_fode(const config::RunConfig& cfg) {
    const int N = steps_from(cfg);
    Grid grid(cfg.T, N);
    const auto table = fracops::caputo_coefficients(cfg.alpha, N);
    Path x;
    bool have_exact = false;
    if (cfg.rhs == "linear") {
        x = fode::solve_linear_implicit(table, cfg.lambda, cfg.x0.at(0), grid);
        have_exact = true;
    } else if (cfg.rhs == "cubic") {
        fode::RhsFunction f;
        f.eval = [](double, std::span<const double> v, std::span<double> out) {
            out[0] = -v[0] - v[0] * v[0] * v[0];
        };
        f.jacobian = [](double, std::span<const double> v, std::span<double> jac) {
            jac[0] = -1.0 - 3.0 * v[0] * v[0];
        };
        f.monotone_nonincreasing = true;
        x = fode::solve_implicit(table, f, std::span(cfg.x0.data(), 1), grid);
    } else {
        throw UsageError("fode: --rhs must be linear or cubic");
    }
    emit::Table out(have_exact ? std::vector<std::string>{"n", "t", "x", "exact", "error"}
                               : std::vector<std::string>{"n", "t", "x"});
    for (int n = 0; n <= N; ++n) {
        if (have_exact) {
            const double e = fode::exact_linear_solution(cfg.alpha, cfg.lambda, cfg.x0.at(0), grid.t(n));
            out.add_row({double(n), grid.t(n), x.value(n), e, x.value(n) - e});
        } else {
            out.add_row({double(n), grid.t(n), x.value(n)});
        }
    }
    if (cfg.out.empty())
        std::fputs(emit::to_csv(out).c_str(), stdout);
    else
        emit::emit(out, emit::Format::csv, cfg.out);
    return 0;
}

int cmd_fbm(const config::RunConfig& cfg) {
    const int N = steps_from(cfg);
    Grid grid(cfg.T, N);
    const Path b = fbm::sample_fbm(cfg.hurst, grid, cfg.seed, 0);
    emit::Table out({"n", "t", "b"});
    for (int n = 0; n <= N; ++n) out.add_row({double(n), grid.t(n), b.value(n)});
    if (cfg.out.empty())
        std::fputs(emit::to_csv(out).c_str(), stdout);
    else
        emit::emit(out, emit::Format::csv, cfg.out);
    return 0;
}

int cmd_fsde(const config::RunConfig& cfg) {
    if (cfg.samples < 2) throw UsageError("fsde: --samples must be at least 2");
    const int N = steps_from(cfg);
    Grid grid(cfg.T, N);
    const auto table = fracops::caputo_coefficients(cfg.alpha, N);
    const auto V = parse_potential(cfg.potential, cfg.mu);
    const auto spec = noise_for(cfg);
    fsde::EnsembleOptions opts;
    opts.threads = cfg.threads;
    const auto res = fsde::ensemble(table, V, fsde::fixed_init(cfg.x0), spec, grid, cfg.samples, cfg.seed,
                                    cfg.hist_times, opts);

    const std::string prefix = cfg.out_prefix.empty() ? "fsde" : cfg.out_prefix;
    emit::Table mean({"t", "mean_sq", "stderr"});
    for (int n = 0; n <= N; ++n) mean.add_row({grid.t(n), res.mean_sq[n], res.stderr_mean_sq[n]});
    emit::emit(mean, emit::Format::csv, prefix + "_meansq.csv");
    for (const auto& h : res.histograms) {
        emit::Table hist({"bin_left", "bin_right", "mass"});
        for (size_t b = 0; b + 1 < h.edges.size(); ++b) hist.add_row({h.edges[b], h.edges[b + 1], h.mass[b]});
        emit::emit(hist, emit::Format::csv, prefix + "_hist_" + emit::format_double(h.time) + ".csv");
    }
    write_manifest(cfg, prefix + "_manifest.json");
    std::printf("wrote %s_meansq.csv (+%zu histograms) and %s_manifest.json\n", prefix.c_str(),
                res.histograms.size(), prefix.c_str());
    return 0;
}

int cmd_gradflow(const config::RunConfig& cfg) {
    const int N = steps_from(cfg);
    Grid grid(cfg.T, N);
    const auto table = fracops::caputo_coefficients(cfg.alpha, N);
    gradflow::ProxOperator prox;
    if (cfg.phi == "quadratic")
        prox = gradflow::prox_quadratic(cfg.mu);
    else if (cfg.phi == "l1")
        prox = gradflow::prox_l1();
    else if (cfg.phi == "quartic")
        prox = gradflow::prox_quartic();
    else if (cfg.phi == "huber")
        prox = gradflow::prox_huber(1.0);
    else
        throw UsageError("gradflow: --phi must be quadratic | l1 | quartic | huber");
    if (prox.dim != 0 && prox.dim != int(cfg.x0.size()))
        throw UsageError("gradflow: this functional is one-dimensional");

    const auto st = gradflow::solve_gradflow(table, prox, cfg.x0, grid);
    std::vector<std::string> cols{"n", "t"};
    for (size_t d = 0; d < cfg.x0.size(); ++d) cols.push_back(cfg.x0.size() == 1 ? "u" : "u" + std::to_string(d));
    cols.push_back("phi");
    cols.push_back("xi_norm");
    const bool with_bound = prox.mu && *prox.mu > 0.0;
    if (with_bound) cols.push_back("decay_bound");
    emit::Table out(cols);
    std::vector<double> row;
    for (int n = 0; n <= N; ++n) {
        row.assign({double(n), grid.t(n)});
        for (double u : st.u.at(n)) row.push_back(u);
        row.push_back(st.phi_vals[n]);
        double nrm = 0.0;
        for (double v : st.xi_at(n)) nrm += v * v;
        row.push_back(std::sqrt(nrm));
        if (with_bound) row.push_back(st.phi_vals[0] * mlf::decay_bound(cfg.alpha, *prox.mu, grid.t(n)));
        out.add_row(row);
    }
    if (cfg.out.empty())
        std::fputs(emit::to_csv(out).c_str(), stdout);
    else
        emit::emit(out, emit::Format::csv, cfg.out);
    return 0;
}

Path restrict_path(const Path& fine, int n_coarse) {
    const int stride = fine.grid.n_steps / n_coarse;
    Path out(Grid(fine.grid.T, n_coarse), fine.dim);
    for (int i = 0; i <= n_coarse; ++i)
        std::copy_n(fine.at(i * stride).begin(), fine.dim, out.at(i).begin());
    return out;
}

int cmd_study(const config::RunConfig& cfg) {
    if (cfg.levels < 3) throw UsageError("study: need at least 3 dyadic refinement levels");
    if (cfg.n0 < 1) throw UsageError("study: --n0 must be positive");
    std::vector<double> ks, errs;
    double gate = 0.0;

    if (cfg.which == "fode") {
        gate = cfg.alpha - 0.1;
        for (int lvl = 0; lvl < cfg.levels; ++lvl) {
            const int N = cfg.n0 << lvl;
            Grid grid(cfg.T, N);
            const auto table = fracops::caputo_coefficients(cfg.alpha, N);
            const Path x = fode::solve_linear_implicit(table, cfg.lambda, cfg.x0.at(0), grid);
            double sup = 0.0;
            for (int n = 0; n <= N; ++n)
                sup = std::max(sup, std::abs(x.value(n) - fode::exact_linear_solution(cfg.alpha, cfg.lambda,
                                                                                      cfg.x0.at(0), grid.t(n))));
            ks.push_back(grid.k());
            errs.push_back(sup);
        }
    } else if (cfg.which == "fsde") {
        gate = cfg.alpha + cfg.hurst - 1.0 - 0.1;
        const auto spec = noise_for(cfg);
        const int samples = cfg.samples > 0 ? cfg.samples : 200;
        const int n_fine = cfg.n0 << cfg.levels;
        Grid fine_grid(cfg.T, n_fine);
        const double h_used = spec.mode == fsde::NoiseMode::physical ? 1.0 - cfg.hurst : cfg.hurst;
        const fbm::Sampler sampler(h_used, fine_grid);
        const auto V = parse_potential(cfg.potential, cfg.mu);
        std::vector<fracops::CoefficientTable> tables;
        for (int lvl = 0; lvl <= cfg.levels; ++lvl)
            tables.push_back(fracops::caputo_coefficients(cfg.alpha, cfg.n0 << lvl));
        errs.assign(cfg.levels, 0.0);
        for (int s = 0; s < samples; ++s) {
            const Path fine_fbm = sampler.sample(cfg.seed, s);
            std::vector<Path> sols;
            for (int lvl = 0; lvl <= cfg.levels; ++lvl) {
                const int N = cfg.n0 << lvl;
                const Path fbm_lvl = restrict_path(fine_fbm, N);
                const Path noise = spec.mode == fsde::NoiseMode::physical
                                       ? fsde::noise_from_fbm_physical(cfg.hurst, fbm_lvl)
                                       : fsde::noise_from_fbm_general(cfg.alpha, spec.sigma, fbm_lvl);
                sols.push_back(fsde::solve_fsde(tables[lvl], V, cfg.x0, noise));
            }
            for (int lvl = 0; lvl < cfg.levels; ++lvl) {
                double sup = 0.0;
                const int N = cfg.n0 << lvl;
                for (int n = 0; n <= N; ++n)
                    sup = std::max(sup, std::abs(sols[lvl].value(n) - sols[lvl + 1].value(2 * n)));
                errs[lvl] += sup / samples;
            }
        }
        for (int lvl = 0; lvl < cfg.levels; ++lvl) ks.push_back(cfg.T / (cfg.n0 << lvl));
    } else if (cfg.which == "gradflow") {
        gate = cfg.alpha / 4.0 - 0.1;
        gradflow::ProxOperator prox =
            cfg.phi == "l1" ? gradflow::prox_l1() : gradflow::prox_quadratic(cfg.mu);
        for (int lvl = 0; lvl < cfg.levels; ++lvl) {
            const double k = cfg.T / (cfg.n0 << lvl);
            ks.push_back(k);
            errs.push_back(gradflow::two_step_comparison(cfg.alpha, prox, cfg.x0, k, cfg.T));
        }
    } else {
        throw UsageError("study: --which must be fode | fsde | gradflow");
    }

    const double order = fode::observed_order(ks, errs);
    emit::Table out({"k", "error"});
    for (size_t i = 0; i < ks.size(); ++i) out.add_row({ks[i], errs[i]});
    if (!cfg.out.empty()) emit::emit(out, emit::Format::csv, cfg.out);
    std::fputs(emit::to_csv(out).c_str(), stdout);
    std::printf("observed_order %.4f (gate %.4f)\n", order, gate);

    if (!cfg.out_prefix.empty()) {
        config::RunManifest m;
        m.config = cfg;
        m.seeds_used.push_back(cfg.seed);
        m.criteria.push_back({0, cfg.which + " study order", order >= gate, order, gate, ""});
        emit::write_file(cfg.out_prefix + "_manifest.json", config::to_json(m));
    }
    return order >= gate ? 0 : 1;
}

int cmd_accept(const config::RunConfig& cfg, const std::string& out_dir) {
    acceptance::AcceptanceOptions opts;
    opts.threads = cfg.threads;
    const auto manifest = acceptance::run_acceptance(cfg.battery, opts);
    bool all_pass = true;
    for (const auto& c : manifest.criteria) {
        std::printf("[%s] %2d %s: %s\n", c.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), c.detail.c_str());
        all_pass = all_pass && c.pass;
    }
    std::printf("%s (%zu criteria, %.1f s)\n", all_pass ? "ACCEPTED" : "REJECTED", manifest.criteria.size(),
                manifest.wall_seconds);
    if (!out_dir.empty()) {
        emit::Table crit({"id", "pass", "measured", "threshold"});
        for (const auto& c : manifest.criteria)
            crit.add_row({double(c.id), c.pass ? 1.0 : 0.0, c.measured, c.threshold});
        emit::emit(crit, emit::Format::csv, out_dir + "/criteria.csv");
        emit::write_file(out_dir + "/manifest.json", config::to_json(manifest));
    }
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional-calculus experiment driver"};
    app.require_subcommand(1);

    config::RunConfig cfg;
    std::string config_path, out_dir;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration; replaces all other flags");
        sub->add_option("--threads", cfg.threads, "worker thread cap (FRACLAB_THREADS also applies)");
    };

    // required unless --config supplies the value; checked after parse
    std::vector<std::pair<CLI::App*, CLI::Option*>> needed;
    auto require = [&](CLI::App* sub, CLI::Option* opt) { needed.emplace_back(sub, opt); };

    auto* coeffs = app.add_subcommand("coeffs", "deconvolution coefficient table");
    require(coeffs, coeffs->add_option("--alpha", cfg.alpha));
    require(coeffs, coeffs->add_option("--n-max", cfg.n_max));
    coeffs->add_option("--out", cfg.out);
    add_common(coeffs);

    auto* mlf_cmd = app.add_subcommand("mlf", "Mittag-Leffler point evaluation");
    require(mlf_cmd, mlf_cmd->add_option("--alpha", cfg.alpha));
    require(mlf_cmd, mlf_cmd->add_option("--z", cfg.z));
    add_common(mlf_cmd);

    auto* fode_cmd = app.add_subcommand("fode", "implicit fractional ODE solve");
    require(fode_cmd, fode_cmd->add_option("--alpha", cfg.alpha));
    fode_cmd->add_option("--lambda", cfg.lambda);
    fode_cmd->add_option("--x0", cfg.x0.at(0));
    fode_cmd->add_option("--T", cfg.T);
    fode_cmd->add_option("--n", cfg.n);
    fode_cmd->add_option("--k", cfg.k);
    fode_cmd->add_option("--rhs", cfg.rhs, "linear | cubic");
    fode_cmd->add_option("--out", cfg.out);
    add_common(fode_cmd);

    auto* fbm_cmd = app.add_subcommand("fbm", "fractional Brownian path sample");
    require(fbm_cmd, fbm_cmd->add_option("--hurst", cfg.hurst));
    fbm_cmd->add_option("--T", cfg.T);
    fbm_cmd->add_option("--n", cfg.n);
    fbm_cmd->add_option("--seed", cfg.seed);
    fbm_cmd->add_option("--out", cfg.out);
    add_common(fbm_cmd);

    auto* fsde_cmd = app.add_subcommand("fsde", "Monte Carlo Langevin ensemble");
    require(fsde_cmd, fsde_cmd->add_option("--alpha", cfg.alpha));
    require(fsde_cmd, fsde_cmd->add_option("--hurst", cfg.hurst));
    fsde_cmd->add_option("--potential", cfg.potential);
    fsde_cmd->add_option("--mu", cfg.mu);
    fsde_cmd->add_option("--x0", cfg.x0);
    fsde_cmd->add_option("--k", cfg.k);
    fsde_cmd->add_option("--T", cfg.T);
    fsde_cmd->add_option("--n", cfg.n);
    fsde_cmd->add_option("--samples", cfg.samples);
    fsde_cmd->add_option("--seed", cfg.seed);
    fsde_cmd->add_option("--hist-times", cfg.hist_times)->delimiter(',');
    fsde_cmd->add_option("--out-prefix", cfg.out_prefix);
    add_common(fsde_cmd);

    auto* gf_cmd = app.add_subcommand("gradflow", "minimizing-movement trajectory");
    require(gf_cmd, gf_cmd->add_option("--alpha", cfg.alpha));
    gf_cmd->add_option("--phi", cfg.phi, "quadratic | l1 | quartic | huber");
    gf_cmd->add_option("--mu", cfg.mu);
    gf_cmd->add_option("--u0", cfg.x0);
    gf_cmd->add_option("--T", cfg.T);
    gf_cmd->add_option("--n", cfg.n);
    gf_cmd->add_option("--k", cfg.k);
    gf_cmd->add_option("--out", cfg.out);
    add_common(gf_cmd);

    auto* study_cmd = app.add_subcommand("study", "dyadic refinement convergence study");
    require(study_cmd, study_cmd->add_option("--which", cfg.which, "fode | fsde | gradflow"));
    study_cmd->add_option("--alpha", cfg.alpha);
    study_cmd->add_option("--hurst", cfg.hurst);
    study_cmd->add_option("--lambda", cfg.lambda);
    study_cmd->add_option("--mu", cfg.mu);
    study_cmd->add_option("--potential", cfg.potential);
    study_cmd->add_option("--phi", cfg.phi);
    study_cmd->add_option("--x0", cfg.x0);
    study_cmd->add_option("--T", cfg.T);
    study_cmd->add_option("--levels", cfg.levels);
    study_cmd->add_option("--n0", cfg.n0);
    study_cmd->add_option("--samples", cfg.samples);
    study_cmd->add_option("--seed", cfg.seed);
    study_cmd->add_option("--out", cfg.out);
    study_cmd->add_option("--out-prefix", cfg.out_prefix);
    add_common(study_cmd);

    auto* accept_cmd = app.add_subcommand("accept", "run the acceptance battery");
    accept_cmd->add_option("--battery", cfg.battery, "coeffs | fode | fsde-small | fsde-paper | gradflow");
    accept_cmd->add_option("--out-dir", out_dir, "write criteria.csv and manifest.json here");
    add_common(accept_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (!config_path.empty()) {
            cfg = config::load_config(config_path);
        } else {
            for (auto& [sub, opt] : needed)
                if (sub->parsed() && opt->count() == 0)
                    throw UsageError(opt->get_name() + " is required (pass it or --config)");
        }
        if (coeffs->parsed()) return cmd_coeffs(cfg);
        if (mlf_cmd->parsed()) return cmd_mlf(cfg);
        if (fode_cmd->parsed()) return cmd_fode(cfg);
        if (fbm_cmd->parsed()) return cmd_fbm(cfg);
        if (fsde_cmd->parsed()) return cmd_fsde(cfg);
        if (gf_cmd->parsed()) return cmd_gradflow(cfg);
        if (study_cmd->parsed()) return cmd_study(cfg);
        if (accept_cmd->parsed()) return cmd_accept(cfg, out_dir);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
    return 0;
}
