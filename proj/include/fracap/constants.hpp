#pragma once

#include <optional>
#include <string>

namespace fracap {

// Unit ball volume in R^n.
double unitBallVolume(int n);

// Poisson-kernel normalization c_{n,s} = pi^{-n/2} Gamma((n+2s)/2) / Gamma(s).
double poissonNormalization(int n, double s);

// Quadrature route for c_{n,s}: reciprocal of the radial integral of
// (1+|x|^2)^{-(n+2s)/2}. Kept independent of the Gamma-formula path; this is
// the cross-check oracle used by the test suites.
double poissonNormalizationQuadrature(int n, double s);

// Extension energy constant
// alpha_{n,s} = s(1-s) pi^{-n/2} Gamma(1-s) Gamma((n+2s)/2) / (Gamma(s) Gamma(2-s)).
double extensionConstant(int n, double s);

// Shared limit of c_{n,s} and alpha_{n,s} as s -> 1^-.
double extensionConstantLimit(int n);

// Quantitative isoperimetric constant c_n = 2 w_n^{2/n} (2-2^{(n-1)/n})^3 / (181^2 n^12).
double isoperimetricConstant(int n);

// C_delta = (3-2 delta)/(3+2 delta) from the asymmetry-transfer lemma.
double asymmetryTransferConstant(double delta);

// lambda = gamma (n-2s)/n and kappa = lambda / (4(1+2 lambda)).
double lambdaConstant(int n, double s, double gamma);
double kappaConstant(int n, double s, double gamma);

// C_3 = 5/(3^5 181^2) (3 w_n)^{2/n} / n^12 * (1 - 2^{-1/n})^3 (gamma = 1/10).
double c3Constant(int n);

// Classical capacity of the unit-radius ball, n >= 3: n(n-2) w_n.
double classicalBallCapacity(int n);

struct StabilityConstantResult {
  double value = 0.0;
  int activeBranch = 1;  // 1: 2^{-3/s}; 2: the kappa/C3 branch
};

// C_{n,s} = max{ 2^{-3/s},
//   kappa^{2/s} C_3 / alpha_{n,s} * (C_4/c_{n,s})^{1/s-1} / ((1-s) capsBall^{1/s}) },
// with capsBall = cap_s of the unit-radius ball (from a solver or cache).
StabilityConstantResult stabilityConstant(int n, double s, double C4, double capsBallUnitRadius,
                                          double gamma = 0.1);

// Limit of C_{n,s} as s -> 1^- (n >= 3):
// max{ 1/8, kappa_1^2 C_3 pi^{n/2}/Gamma((n+2)/2) * 2/(n(n-2) w_n^2) },
// kappa_1 from lambda_1 = gamma (n-2)/n.
StabilityConstantResult stabilityConstantLimit(int n, double gamma = 0.1);

struct ConstantsTable {
  int n = 3;
  double s = 0.5;
  double gamma = 0.1;
  double C4 = 1.0;
  double omega_n = 0.0;
  double c_ns = 0.0;
  double alpha_ns = 0.0;
  double c_n_iso = 0.0;
  double lambda = 0.0;
  double kappa = 0.0;
  double C3 = 0.0;
  std::optional<double> capsBallUnitRadius;  // fractional, from solver/cache
  std::optional<double> C_ns;
  std::optional<int> C_ns_branch;
  std::optional<double> C_n_limit;            // n >= 3 only
  std::optional<double> capBUnitClassical;    // n >= 3 only
};

// Assembles the table; capsBallUnitRadius may be absent, in which case the
// C_{n,s} entry is omitted (a solver must supply the ball capacity).
ConstantsTable makeConstantsTable(int n, double s, double gamma = 0.1, double C4 = 1.0,
                                  std::optional<double> capsBallUnitRadius = std::nullopt);

std::string constantsTableToJson(const ConstantsTable& t);

}  // namespace fracap
