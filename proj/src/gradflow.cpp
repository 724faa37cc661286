#include "fraclab/gradflow.hpp"
#include "fraclab/gamma.hpp"
#include "fraclab/kahan.hpp"
#include "fraclab/mlf.hpp"
#include "implicit_node.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace fraclab::gradflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

fode::SolverOptions prox_solver_options() {
    fode::SolverOptions o;
    o.newton_tol = 1e-12;
    o.max_newton_iters = 100;
    return o;
}

void check_dim(const ProxOperator& prox, int d, const char* who) {
    if (prox.dim > 0 && prox.dim != d) throw LengthMismatch(std::string(who) + ": prox dimension mismatch");
}

} // namespace

ProxOperator prox_quadratic(double mu) {
    if (!(mu > 0.0)) throw UsageError("prox_quadratic: mu must be positive");
    ProxOperator p;
    p.prox = [mu](std::span<const double> w, double tau, std::span<double> out) {
        for (size_t i = 0; i < w.size(); ++i) out[i] = w[i] / (1.0 + tau * mu);
    };
    p.phi = [mu](std::span<const double> u) {
        double s = 0.0;
        for (double v : u) s += v * v;
        return 0.5 * mu * s;
    };
    p.mu = mu;
    p.name = "quadratic";
    return p;
}

ProxOperator prox_l1() {
    ProxOperator p;
    p.prox = [](std::span<const double> w, double tau, std::span<double> out) {
        for (size_t i = 0; i < w.size(); ++i) {
            const double m = std::abs(w[i]) - tau;
            out[i] = m > 0.0 ? std::copysign(m, w[i]) : 0.0;
        }
    };
    p.phi = [](std::span<const double> u) {
        double s = 0.0;
        for (double v : u) s += std::abs(v);
        return s;
    };
    p.name = "l1";
    return p;
}

ProxOperator prox_box(double lo, double hi) {
    if (!(hi > lo)) throw UsageError("prox_box: need hi > lo");
    ProxOperator p;
    p.prox = [lo, hi](std::span<const double> w, double, std::span<double> out) {
        for (size_t i = 0; i < w.size(); ++i) out[i] = std::clamp(w[i], lo, hi);
    };
    p.phi = [lo, hi](std::span<const double> u) {
        for (double v : u)
            if (v < lo - 1e-12 || v > hi + 1e-12) return kInf;
        return 0.0;
    };
    p.name = "box";
    return p;
}

ProxOperator prox_huber(double delta) {
    if (!(delta > 0.0)) throw UsageError("prox_huber: need delta > 0");
    ProxOperator p;
    p.prox = [delta](std::span<const double> w, double tau, std::span<double> out) {
        for (size_t i = 0; i < w.size(); ++i) {
            if (std::abs(w[i]) <= delta * (1.0 + tau))
                out[i] = w[i] / (1.0 + tau);
            else
                out[i] = w[i] - std::copysign(tau * delta, w[i]);
        }
    };
    p.phi = [delta](std::span<const double> u) {
        double s = 0.0;
        for (double v : u) {
            const double a = std::abs(v);
            s += a <= delta ? 0.5 * v * v : delta * (a - 0.5 * delta);
        }
        return s;
    };
    p.name = "huber";
    return p;
}

ProxOperator prox_smooth(int dim, std::function<double(std::span<const double>)> phi,
                         std::function<void(std::span<const double>, std::span<double>)> grad,
                         std::optional<double> mu) {
    if (dim < 1) throw UsageError("prox_smooth: need dim >= 1");
    if (!phi || !grad) throw UsageError("prox_smooth: phi and grad are required");
    ProxOperator p;
    p.dim = dim;
    p.phi = phi;
    // u + tau grad(u) = w  <=>  u - tau * (-grad(u)) = w
    p.prox = [dim, grad](std::span<const double> w, double tau, std::span<double> out) {
        std::vector<double> gbuf(static_cast<size_t>(dim));
        detail::EvalFn eval = [&](std::span<const double> xv, std::span<double> o) {
            grad(xv, gbuf);
            for (int i = 0; i < dim; ++i) o[i] = -gbuf[i];
        };
        std::copy(w.begin(), w.end(), out.begin());
        try {
            detail::solve_node(eval, {}, dim, 1.0, tau, w, out, prox_solver_options());
        } catch (const NewtonDiverged&) {
            throw ProxFailure("prox_smooth: inner solver did not reach tolerance");
        }
    };
    p.mu = mu;
    p.name = "smooth";
    return p;
}

ProxOperator prox_quartic() {
    ProxOperator p = prox_smooth(
        1, [](std::span<const double> u) { return 0.25 * u[0] * u[0] * u[0] * u[0]; },
        [](std::span<const double> u, std::span<double> g) { g[0] = u[0] * u[0] * u[0]; });
    p.name = "quartic";
    return p;
}

void degiorgi_step(const fracops::CoefficientTable& table, const ProxOperator& prox, Path& u, int n,
                   std::span<double> xi_out) {
    const int d = u.dim;
    check_dim(prox, d, "degiorgi_step");
    if (n < 1 || n > u.grid.n_steps) throw UsageError("degiorgi_step: node outside the grid");
    if (table.n_max() < n) throw TableTooShort("degiorgi_step: table shorter than requested node");
    const double c0 = table.c[0];
    const double tau = std::pow(u.grid.k(), table.alpha) / c0;
    std::vector<double> w(static_cast<size_t>(d));
    std::vector<NeumaierSum> acc(static_cast<size_t>(d));
    for (int j = 1; j <= n - 1; ++j) {
        auto uj = u.at(n - j);
        for (int c = 0; c < d; ++c) acc[c].add(table.c[j] * uj[c]);
    }
    auto u0 = u.at(0);
    for (int c = 0; c < d; ++c) {
        acc[c].add(table.c_tail[n] * u0[c]);
        w[c] = acc[c].value() / c0;
    }
    auto un = u.at(n);
    prox.prox(w, tau, un);
    if (!xi_out.empty()) {
        if (static_cast<int>(xi_out.size()) != d) throw LengthMismatch("degiorgi_step: xi_out size");
        for (int c = 0; c < d; ++c) xi_out[c] = (w[c] - un[c]) / tau;
    }
}

GradFlowState solve_gradflow(const fracops::CoefficientTable& table, const ProxOperator& prox,
                             std::span<const double> u0, const Grid& grid) {
    const int d = static_cast<int>(u0.size());
    if (d < 1) throw UsageError("solve_gradflow: empty initial state");
    check_dim(prox, d, "solve_gradflow");
    if (table.n_max() < grid.n_steps) throw TableTooShort("solve_gradflow: table shorter than grid");
    GradFlowState st{table, prox, Path(grid, d),
                     std::vector<double>(static_cast<size_t>(grid.n_steps + 1) * d, 0.0),
                     std::vector<double>(static_cast<size_t>(grid.n_steps + 1), 0.0)};
    std::copy(u0.begin(), u0.end(), st.u.at(0).begin());
    st.phi_vals[0] = prox.phi(st.u.at(0));
    for (int n = 1; n <= grid.n_steps; ++n) {
        degiorgi_step(table, prox, st.u, n, {st.xi.data() + static_cast<size_t>(n) * d, static_cast<size_t>(d)});
        st.phi_vals[n] = prox.phi(st.u.at(n));
    }
    return st;
}

std::vector<double> interpolate_continuous(const GradFlowState& state, double t) {
    const Grid& grid = state.u.grid;
    if (!(t >= 0.0) || t > grid.T * (1.0 + 1e-12) + 1e-300)
        throw UsageError("interpolate_continuous: t outside [0, T]");
    t = std::min(t, grid.T);
    const int d = state.dim();
    const double inv_g = 1.0 / gamma_fn(1.0 + state.table.alpha);
    const double alpha = state.table.alpha;
    std::vector<NeumaierSum> acc(static_cast<size_t>(d));
    for (int m = 1; m <= grid.n_steps; ++m) {
        const double lo = grid.t(m - 1);
        if (!(t > lo)) break;
        const double hi = grid.t(m);
        const double w = std::pow(t - lo, alpha) - (t > hi ? std::pow(t - hi, alpha) : 0.0);
        auto xm = state.xi_at(m);
        for (int c = 0; c < d; ++c) acc[c].add(w * -xm[c]);
    }
    std::vector<double> out(static_cast<size_t>(d));
    auto u0 = state.u.at(0);
    for (int c = 0; c < d; ++c) out[c] = u0[c] + inv_g * acc[c].value();
    return out;
}

bool dissipation_check(const GradFlowState& state) {
    const int N = state.u.grid.n_steps;
    const int d = state.dim();
    std::vector<double> xi_sq(static_cast<size_t>(N));
    for (int m = 1; m <= N; ++m) {
        double s = 0.0;
        auto xm = state.xi_at(m);
        for (int c = 0; c < d; ++c) s += xm[c] * xm[c];
        xi_sq[m - 1] = s;
    }
    const auto J = fracops::discrete_frac_integral(state.table, xi_sq, state.u.grid.k());
    for (int n = 1; n <= N; ++n)
        if (!(state.phi_vals[n] - state.phi_vals[0] <= -J[n - 1] + 1e-8)) return false;
    return true;
}

double holder_exponent(const GradFlowState& state, std::span<const double> lags) {
    const Grid& grid = state.u.grid;
    if (lags.size() < 2) throw UsageError("holder_exponent: need at least two lags");
    for (double lag : lags)
        if (!(lag > 0.0) || lag > grid.T / 4.0 + 1e-12)
            throw UsageError("holder_exponent: lags must lie in (0, T/4]");
    const int n_probe = 4 * grid.n_steps;
    std::vector<double> lx, ly;
    for (double lag : lags) {
        double sup = 0.0;
        const double tmax = grid.T - lag;
        for (int i = 0; i <= n_probe; ++i) {
            const double t = tmax * i / n_probe;
            const auto a = interpolate_continuous(state, t);
            const auto b = interpolate_continuous(state, t + lag);
            double s = 0.0;
            for (size_t c = 0; c < a.size(); ++c) s += (b[c] - a[c]) * (b[c] - a[c]);
            sup = std::max(sup, std::sqrt(s));
        }
        if (sup > 0.0) {
            lx.push_back(std::log(lag));
            ly.push_back(std::log(sup));
        }
    }
    if (lx.size() < 2) return kInf; // flat path: no measurable increments
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(lx.size());
    my /= static_cast<double>(lx.size());
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < lx.size(); ++i) {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    return num / den;
}

bool decay_check(const GradFlowState& state, std::span<const double> u_star, double phi_star) {
    if (!state.prox.mu || !(*state.prox.mu > 0.0)) throw UsageError("decay_check: needs mu > 0");
    if (static_cast<int>(u_star.size()) != state.dim()) throw LengthMismatch("decay_check: u_star dimension");
    const double phi_at_star = state.prox.phi(u_star);
    if (std::abs(phi_at_star - phi_star) > 1e-8 * std::max(1.0, std::abs(phi_star)))
        throw UsageError("decay_check: phi(u_star) does not match phi_star");
    const double mu = *state.prox.mu;
    const double gap0 = state.phi_vals[0] - phi_star;
    const double ka = std::pow(state.u.grid.k(), state.table.alpha);
    const double tol = 1e-6 + 0.05 * gap0 * ka;
    for (int n = 0; n <= state.u.grid.n_steps; ++n) {
        const double bound = gap0 * mlf::decay_bound(state.table.alpha, mu, state.u.grid.t(n)) + tol;
        if (!(state.phi_vals[n] - phi_star <= bound)) return false;
    }
    return true;
}

double two_step_comparison(double alpha, const ProxOperator& prox, std::span<const double> u0, double k,
                           double T) {
    if (!(T > 0.0) || !(k > 0.0)) throw UsageError("two_step_comparison: need positive k and T");
    const double r = T / k;
    const double m = std::round(std::log2(r));
    if (!(m >= 0.0) || std::abs(r - std::exp2(m)) > 1e-9 * r)
        throw UsageError("two_step_comparison: k must equal T/2^m");
    const int n1 = static_cast<int>(std::exp2(m));
    const int n2 = 2 * n1;
    auto table = fracops::caputo_coefficients(alpha, n2);
    GradFlowState a = solve_gradflow(table, prox, u0, Grid(T, n1));
    GradFlowState b = solve_gradflow(table, prox, u0, Grid(T, n2));
    const int n_probe = 4 * n2;
    double sup = 0.0;
    for (int i = 0; i <= n_probe; ++i) {
        const double t = T * i / n_probe;
        const auto ua = interpolate_continuous(a, t);
        const auto ub = interpolate_continuous(b, t);
        double s = 0.0;
        for (size_t c = 0; c < ua.size(); ++c) s += (ua[c] - ub[c]) * (ua[c] - ub[c]);
        sup = std::max(sup, std::sqrt(s));
    }
    return sup;
}

} // namespace fraclab::gradflow
