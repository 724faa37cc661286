#pragma once
// Time-fractional gradient flows by minimizing movements: each step is one
// proximal map at the c-weighted history average. Completing the square in
// the step functional (1/(2 k^alpha)) (c_0 |u|^2 - 2 u . sum_j c_j U_{n-j}
// - 2 u . c_tail U_0 + ...) + phi(u) shows the exact minimizer is
// prox_{tau phi}(w_n) with w_n = (sum_j c_j U_{n-j} + c_tail[n] U_0)/c_0 and
// tau = k^alpha / c_0; the weights sum to c_0, so w_n is a convex average.
#include "fraclab/fracops.hpp"
#include "fraclab/grid.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fraclab::gradflow {

// prox(w, tau, out) = argmin_u (1/(2 tau)) |u-w|^2 + phi(u). dim == 0 means
// the operator acts componentwise in any dimension.
struct ProxOperator {
    int dim = 0;
    std::function<void(std::span<const double>, double, std::span<double>)> prox;
    std::function<double(std::span<const double>)> phi;
    std::optional<double> mu; // strong-convexity modulus, when known
    std::string name = "custom";
};

ProxOperator prox_quadratic(double mu);      // phi = mu |u|^2 / 2
ProxOperator prox_l1();                      // phi = sum |u_i|
ProxOperator prox_box(double lo, double hi); // indicator of [lo, hi]^d
ProxOperator prox_quartic();                 // phi = u^4/4, 1-D Newton on the cubic
ProxOperator prox_huber(double delta);       // quadratic core, linear tails
// Newton on u + tau grad(u) = w to 1e-12; convex differentiable phi.
ProxOperator prox_smooth(int dim, std::function<double(std::span<const double>)> phi,
                         std::function<void(std::span<const double>, std::span<double>)> grad,
                         std::optional<double> mu = {});

struct GradFlowState {
    fracops::CoefficientTable table;
    ProxOperator prox;
    Path u;                       // nodes 0..N
    std::vector<double> xi;       // (N+1)*dim, node 0 unused (zeros); -xi[n] is the discrete derivative
    std::vector<double> phi_vals; // phi(U[n]), nodes 0..N

    int dim() const { return u.dim; }
    std::span<const double> xi_at(int n) const {
        return {xi.data() + static_cast<size_t>(n) * u.dim, static_cast<size_t>(u.dim)};
    }
};

// Computes U[n] from nodes 0..n-1 of u (in place) and returns xi_n = (w_n - U_n)/tau
// through xi_out when non-empty.
void degiorgi_step(const fracops::CoefficientTable& table, const ProxOperator& prox, Path& u, int n,
                   std::span<double> xi_out = {});

GradFlowState solve_gradflow(const fracops::CoefficientTable& table, const ProxOperator& prox,
                             std::span<const double> u0, const Grid& grid);

// U(t) = U0 + (1/Gamma(1+alpha)) sum_m [(t-t_{m-1})^alpha - ((t-t_m)_+)^alpha] (-xi_m),
// the exact fractional integral of the piecewise-constant slope; equals U[n] at t_n.
std::vector<double> interpolate_continuous(const GradFlowState& state, double t);

// phi(U[n]) - phi(U[0]) <= -k^alpha sum_{m<=n} a[n-m] |xi_m|^2 + 1e-8 for every n.
bool dissipation_check(const GradFlowState& state);

// LS slope of log sup_t |U(t+lag)-U(t)| against log lag; +inf for flat paths.
double holder_exponent(const GradFlowState& state, std::span<const double> lags);

// phi(U[n]) - phi_star <= (phi(U0)-phi_star) E_alpha(-2 mu t_n^alpha) + tol_n,
// tol_n = 1e-6 + 0.05 (phi(U0)-phi_star) k^alpha.
bool decay_check(const GradFlowState& state, std::span<const double> u_star, double phi_star);

// sup_t |U_k(t) - U_{k/2}(t)| over a fine probe grid; k must be T/2^m.
double two_step_comparison(double alpha, const ProxOperator& prox, std::span<const double> u0, double k,
                           double T);

} // namespace fraclab::gradflow
