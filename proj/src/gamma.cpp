#include "fracap/gamma.hpp"

#include <cmath>
#include <stdexcept>

namespace fracap {

namespace {

// Lanczos g=7, n=9 coefficients (Godfrey/Pugh tabulation).
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,  676.5203681218851,    -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,  12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczosPositive(double x) {
  // valid for x >= 0.5
  const double z = x - 1.0;
  double a = kLanczos[0];
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (z + i);
  const double t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

}  // namespace

double gammaFn(double x) {
  if (std::isnan(x)) throw std::domain_error("gammaFn: nan argument");
  if (x <= 0.0 && x == std::floor(x)) throw std::domain_error("gammaFn: nonpositive integer");
  if (x < 0.5) {
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return M_PI / (std::sin(M_PI * x) * lanczosPositive(1.0 - x));
  }
  return lanczosPositive(x);
}

double logGammaFn(double x) {
  if (x <= 0.0) throw std::domain_error("logGammaFn: requires x > 0");
  if (x < 0.5) return std::log(M_PI / std::sin(M_PI * x)) - logGammaFn(1.0 - x);
  const double z = x - 1.0;
  double a = kLanczos[0];
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (z + i);
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * M_PI) + (z + 0.5) * std::log(t) - t + std::log(a);
}

double gammaStirling(double x) {
  if (x <= 0.0) throw std::domain_error("gammaStirling: requires x > 0");
  // Shift upward until the asymptotic series is accurate, then divide back.
  double shiftProduct = 1.0;
  double y = x;
  while (y < 20.0) {
    shiftProduct *= y;
    y += 1.0;
  }
  // Stirling series with Bernoulli-number terms B_2..B_16.
  const double series[8] = {1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680,
                            1.0 / 1188, -691.0 / 360360, 1.0 / 156, -3617.0 / 122400};
  double corr = 0.0;
  double yp = y;
  for (int k = 0; k < 8; ++k) {
    corr += series[k] / yp;
    yp *= y * y;
  }
  const double lg = (y - 0.5) * std::log(y) - y + 0.5 * std::log(2.0 * M_PI) + corr;
  return std::exp(lg) / shiftProduct;
}

}  // namespace fracap
