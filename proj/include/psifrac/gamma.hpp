#pragma once

namespace psifrac {

// Gamma function for positive real arguments, Lanczos approximation
// (g = 7, 9 coefficients). Relative error is below 1e-12 on the range
// used by the kernel constants here (roughly (0, 30)); all fractional
// quadrature weights and power-rule constants are ratios of these values.
double gamma_fn(double x);

// log Gamma for x > 0, same approximation. Useful when ratios of large
// arguments are needed without overflow.
double log_gamma_fn(double x);

}  // namespace psifrac
