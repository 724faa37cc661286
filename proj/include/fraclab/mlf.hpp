#pragma once

namespace fraclab::mlf {

// One-parameter Mittag-Leffler function E_alpha(z) for alpha in (0, 1], real z.
// Accuracy contract: |result - E_alpha(z)| <= tol * max(1, |E_alpha(z)|).
// Dispatches between the Taylor series and the spectral integral; throws
// NotConverged if no branch can meet tol.
double mittag_leffler(double alpha, double z, double tol = 1e-12);

// Taylor series branch. err_est (optional out) receives a conservative bound
// on the absolute summation error; the series is ill-conditioned for strongly
// negative z (terms grow like exp(|z|^{1/alpha})), which the estimate tracks.
double series_branch(double alpha, double z, double tol, double* err_est = nullptr);

// Spectral branch for negative arguments, x = -z > 0: integrates the
// completely monotone density exp(-r x^{1/alpha}) K_alpha(r) dr.
double spectral_branch(double alpha, double x, double tol);

// E_alpha(-2 mu t^alpha): decay envelope of the strongly convex flows.
double decay_bound(double alpha, double mu, double t, double tol = 1e-12);

} // namespace fraclab::mlf
