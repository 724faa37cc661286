#pragma once

namespace fraclab {

// Gamma function on the real line, poles at 0, -1, -2, ... excluded.
// Lanczos approximation (g = 7, 9 terms) with the reflection formula for
// x < 0.5; relative accuracy better than 1e-13 on (-1, 30) away from poles.
double gamma_fn(double x);

} // namespace fraclab
