#include "fracap/quadrature.hpp"

#include <cmath>

namespace fracap {

namespace {

// Kronrod-15 nodes/weights on [-1,1]; Gauss-7 weights on the odd-index nodes.
const double kXgk[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,                0.207784955007898,
    0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
const double kWgk[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
const double kWg[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

struct Panel {
  double integral, error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), hl = 0.5 * (b - a);
  double ig = 0.0, ik = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double v = f(c + hl * kXgk[i]);
    ik += kWgk[i] * v;
    if (i % 2 == 1) ig += kWg[i / 2] * v;
  }
  ik *= hl;
  ig *= hl;
  return {ik, std::abs(ik - ig)};
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double tolLocal, int depth) {
  Panel p = gk15(f, a, b);
  if (depth <= 0 || p.error <= tolLocal) return p.integral;
  const double m = 0.5 * (a + b);
  return adapt(f, a, m, 0.5 * tolLocal, depth - 1) +
         adapt(f, m, b, 0.5 * tolLocal, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double relTol, double absTol, int maxDepth) {
  if (a == b) return 0.0;
  Panel whole = gk15(f, a, b);
  const double tol = std::max(absTol, relTol * std::abs(whole.integral));
  if (whole.error <= tol) return whole.integral;
  const double m = 0.5 * (a + b);
  return adapt(f, a, m, 0.5 * tol, maxDepth) + adapt(f, m, b, 0.5 * tol, maxDepth);
}

double integrateToInf(const std::function<double(double)>& f, double a,
                      double relTol, double absTol) {
  auto g = [&](double u) {
    const double t = a + u / (1.0 - u);
    const double jac = 1.0 / ((1.0 - u) * (1.0 - u));
    return f(t) * jac;
  };
  return integrate(g, 0.0, 1.0 - 1e-14, relTol, absTol);
}

}  // namespace fracap
