#include "fraclab/gamma.hpp"
#include "fraclab/errors.hpp"

#include <cmath>

namespace fraclab {

namespace {
// Godfrey's Lanczos coefficients for g = 7.
constexpr double kLanczos[9] = {
    0.99999999999980993,   676.5203681218851,     -1259.1392167224028,
    771.32342877765313,    -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,  9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_positive(double x) {
    // valid for x >= 0.5
    double acc = kLanczos[0];
    for (int i = 1; i < 9; ++i) acc += kLanczos[i] / (x - 1.0 + i);
    double t = x + 6.5;
    return std::sqrt(2.0 * M_PI) * std::pow(t, x - 0.5) * std::exp(-t) * acc;
}
} // namespace

double gamma_fn(double x) {
    if (std::isnan(x)) throw UsageError("gamma_fn: NaN argument");
    if (x <= 0.0 && x == std::floor(x))
        throw UsageError("gamma_fn: pole at nonpositive integer");
    if (x >= 0.5) return lanczos_positive(x);
    // reflection: Gamma(x) = pi / (sin(pi x) * Gamma(1 - x))
    return M_PI / (std::sin(M_PI * x) * lanczos_positive(1.0 - x));
}

} // namespace fraclab
