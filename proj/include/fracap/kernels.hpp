#pragma once

#include <vector>

namespace fracap {

// Radial integrals of the Gagliardo kernel K(v) = |v|^{-n-2s} against the
// exterior of the unit sphere E = {|w| > 1} and the monopole far-field
// profile phi(w) = |w|^{-(n-2s)}. All quantities scale exactly in the
// truncation radius:
//   tau_R(x)   = R^{-2s} tauHat(|x|/R)     (cell-to-exterior tail)
//   sigma_R(x) = R^{-2s} sigmaHat(|x|/R)   (cell-to-exterior against phi)
//   qq_R(x)    = R^{-2s} qqHat(|x|/R)      (cell-to-exterior against phi^2)
//   J_R        = R^{n-2s} J                (ordered exterior-exterior energy)
struct ExteriorTables {
  int n = 2;
  double s = 0.5;
  double beta = 0.0;  // n - 2s
  double J = 0.0;

  std::vector<double> uNodes;  // ascending u = 1-q
  std::vector<double> logTau, logSigma, logQq;

  double tauHat(double q) const;
  double sigmaHat(double q) const;
  double qqHat(double q) const;
};

// Cached per (n,s); thread-safe against concurrent lookups.
const ExteriorTables& exteriorTables(int n, double s);

// Second moment of the kernel over the near-offset window (unit spacing):
// mHat2 = int_{[-2,2]^n} |v|^{2-n-2s} prod_k beta1(v_k) dv with the
// triangular partition-of-unity window beta1.
double nearFieldMoment(int n, double s);

// Scale factor applied to midpoint weights of the 3^n-1 offset-one pairs so
// that the near field reproduces the moment above for smooth functions.
double nearFieldScale(int n, double s);

// angular integral over S^{n-1} of (a - b cos t)^{-p}
double angularKernel(int n, double p, double a, double b);

}  // namespace fracap
