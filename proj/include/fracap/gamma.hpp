#pragma once

namespace fracap {

// Gamma function by the Lanczos approximation (g = 7, 9 coefficients,
// ~15 significant digits) with the reflection formula for x < 0.5.
double gammaFn(double x);
double logGammaFn(double x);

// Independent check route: Stirling series at a shifted argument.
// Used by tests as the cross-oracle; not by the production constants.
double gammaStirling(double x);

}  // namespace fracap
