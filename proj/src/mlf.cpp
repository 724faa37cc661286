#include "fraclab/mlf.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/fracops.hpp"
#include "fraclab/kahan.hpp"
#include "fraclab/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fraclab::mlf {

namespace {
void validate(double alpha) { fracops::FractionalOrder ord(alpha); }
} // namespace

double series_branch(double alpha, double z, double tol, double* err_est) {
    validate(alpha);
    if (!(tol > 0.0)) throw UsageError("series_branch: tol must be positive");
    if (z == 0.0) {
        if (err_est) *err_est = 0.0;
        return 1.0;
    }
    const double lz = std::log(std::abs(z));
    NeumaierSum sum;
    sum.add(1.0);
    double abs_terms = 1.0;
    double weighted_noise = 0.0; // sum |t_n| * (per-term exponent error)
    double tail = std::numeric_limits<double>::infinity();
    int n = 1;
    for (; n <= 100000; ++n) {
        const double expo = n * lz - std::lgamma(n * alpha + 1.0);
        if (expo > 700.0) throw NotConverged("series_branch: terms overflow double range");
        double t = std::exp(expo);
        abs_terms += t;
        weighted_noise += t * (std::abs(expo) + 4.0);
        if (z < 0.0 && (n & 1)) t = -t;
        sum.add(t);
        tail = std::abs(t);
        // once terms decay, the remainder is dominated by the next term
        if (n * alpha + 1.0 > std::abs(z) && tail < 1e-17 * std::max(1.0, std::abs(sum.value()))) break;
    }
    const double noise = weighted_noise * std::numeric_limits<double>::epsilon();
    if (err_est) *err_est = noise + tail;
    const double s = sum.value();
    if (noise + tail > tol * std::max(1.0, std::abs(s)))
        throw NotConverged("series_branch: cancellation exceeds tolerance");
    return s;
}

double spectral_branch(double alpha, double x, double tol) {
    validate(alpha);
    if (!(x > 0.0)) throw UsageError("spectral_branch: requires x = -z > 0");
    if (!(tol > 0.0)) throw UsageError("spectral_branch: tol must be positive");
    if (alpha == 1.0) return std::exp(-x); // density degenerates to a point mass
    // After u = r^alpha:
    //   E_alpha(-x) = sin(pi a)/(pi a) * int_0^inf exp(-(u x)^{1/a}) / (u^2 + 2 u cos(pi a) + 1) du
    const double t = std::pow(x, 1.0 / alpha);
    const double ca = std::cos(M_PI * alpha);
    const double pref = std::sin(M_PI * alpha) / (M_PI * alpha);
    auto integrand = [&](double u) {
        const double e = -std::pow(u, 1.0 / alpha) * t;
        if (e < -745.0) return 0.0;
        return std::exp(e) / ((u + ca) * (u + ca) + 1.0 - ca * ca);
    };
    // The exponential factor dies past u = 746^alpha/x; breakpoints track both
    // its scale (exponent = 1, 8, 64) and the unit scale of the rational
    // factor, so the adaptive pass never straddles the spike blindly.
    const double u_end = std::pow(746.0, alpha) / x;
    double pts[8] = {0.0, u_end, 0, 0, 0, 0, 0, 0};
    int n_pts = 2;
    for (double w : {1.0, 8.0, 64.0}) {
        const double u = std::pow(w, alpha) / x;
        if (u > 0.0 && u < u_end) pts[n_pts++] = u;
    }
    for (double u : {1.0, 4.0})
        if (u < u_end) pts[n_pts++] = u;
    std::sort(pts, pts + n_pts);
    const double abs_tol = 0.25 * tol / pref / (n_pts - 1);
    double total = 0.0;
    for (int i = 0; i + 1 < n_pts; ++i)
        if (pts[i + 1] > pts[i]) total += integrate_adaptive(integrand, pts[i], pts[i + 1], abs_tol).value;
    return pref * total;
}

double mittag_leffler(double alpha, double z, double tol) {
    validate(alpha);
    if (!(tol > 0.0)) throw UsageError("mittag_leffler: tol must be positive");
    if (alpha == 1.0) return std::exp(z);
    if (z >= 0.0) return series_branch(alpha, z, tol);
    if (z >= -5.0) {
        // series preferred near the origin; falls through on cancellation
        try {
            return series_branch(alpha, z, tol);
        } catch (const NotConverged&) {
        }
    }
    return spectral_branch(alpha, -z, tol);
}

double decay_bound(double alpha, double mu, double t, double tol) {
    if (!(mu >= 0.0)) throw UsageError("decay_bound: mu must be nonnegative");
    if (!(t >= 0.0)) throw UsageError("decay_bound: t must be nonnegative");
    return mittag_leffler(alpha, -2.0 * mu * std::pow(t, alpha), tol);
}

} // namespace fraclab::mlf
