#include "fracap/constants.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fracap/gamma.hpp"
#include "fracap/quadrature.hpp"
#include <json.hpp>

namespace fracap {

namespace {

void requireOrder(int n, double s) {
  if (n < 1) throw std::domain_error("dimension must be >= 1");
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("s must lie in (0,1)");
}

}  // namespace

double unitBallVolume(int n) {
  if (n < 1) throw std::domain_error("dimension must be >= 1");
  return std::pow(M_PI, 0.5 * n) / gammaFn(0.5 * n + 1.0);
}

double poissonNormalization(int n, double s) {
  requireOrder(n, s);
  return std::pow(M_PI, -0.5 * n) * gammaFn(0.5 * (n + 2.0 * s)) / gammaFn(s);
}

double poissonNormalizationQuadrature(int n, double s) {
  requireOrder(n, s);
  const double sphere = n * unitBallVolume(n);  // |S^{n-1}|
  const double p = 0.5 * (n + 2.0 * s);
  auto f = [&](double r) { return std::pow(r, n - 1) * std::pow(1.0 + r * r, -p); };
  const double integral = sphere * integrateToInf(f, 0.0, 1e-12);
  return 1.0 / integral;
}

double extensionConstant(int n, double s) {
  requireOrder(n, s);
  return s * (1.0 - s) * std::pow(M_PI, -0.5 * n) * gammaFn(1.0 - s) *
         gammaFn(0.5 * (n + 2.0 * s)) / (gammaFn(s) * gammaFn(2.0 - s));
}

double extensionConstantLimit(int n) {
  if (n < 1) throw std::domain_error("dimension must be >= 1");
  return std::pow(M_PI, -0.5 * n) * gammaFn(0.5 * (n + 2.0));
}

double isoperimetricConstant(int n) {
  if (n < 2) throw std::domain_error("isoperimetricConstant: requires n >= 2");
  const double wn = unitBallVolume(n);
  const double num = 2.0 * std::pow(wn, 2.0 / n) *
                     std::pow(2.0 - std::pow(2.0, (n - 1.0) / n), 3.0);
  return num / (181.0 * 181.0 * std::pow((double)n, 12.0));
}

double asymmetryTransferConstant(double delta) {
  if (!(delta >= 0.0 && delta < 1.5))
    throw std::domain_error("asymmetryTransferConstant: delta out of range");
  return (3.0 - 2.0 * delta) / (3.0 + 2.0 * delta);
}

double lambdaConstant(int n, double s, double gamma) {
  requireOrder(n, s);
  if (!(gamma > 0.0 && gamma < 1.0 / 9.0))
    throw std::domain_error("gamma must lie in (0,1/9)");
  return gamma * (n - 2.0 * s) / n;
}

double kappaConstant(int n, double s, double gamma) {
  const double lam = lambdaConstant(n, s, gamma);
  return lam / (4.0 * (1.0 + 2.0 * lam));
}

double c3Constant(int n) {
  if (n < 1) throw std::domain_error("dimension must be >= 1");
  const double wn = unitBallVolume(n);
  return 5.0 / (243.0 * 181.0 * 181.0) * std::pow(3.0 * wn, 2.0 / n) /
         std::pow((double)n, 12.0) * std::pow(1.0 - std::pow(2.0, -1.0 / n), 3.0);
}

double classicalBallCapacity(int n) {
  if (n < 3) throw std::domain_error("classicalBallCapacity: requires n >= 3");
  return n * (n - 2.0) * unitBallVolume(n);
}

StabilityConstantResult stabilityConstant(int n, double s, double C4, double capsBallUnitRadius,
                                          double gamma) {
  requireOrder(n, s);
  if (!(n > 2.0 * s)) throw std::domain_error("stabilityConstant: requires n > 2s");
  if (!(C4 > 0.0)) throw std::domain_error("stabilityConstant: C4 must be positive");
  if (!(capsBallUnitRadius > 0.0))
    throw std::domain_error("stabilityConstant: ball capacity required");
  const double branch1 = std::pow(2.0, -3.0 / s);
  const double kap = kappaConstant(n, s, gamma);
  const double branch2 = std::pow(kap, 2.0 / s) * c3Constant(n) / extensionConstant(n, s) *
                         std::pow(C4 / poissonNormalization(n, s), 1.0 / s - 1.0) /
                         ((1.0 - s) * std::pow(capsBallUnitRadius, 1.0 / s));
  StabilityConstantResult r;
  if (branch2 > branch1) {
    r.value = branch2;
    r.activeBranch = 2;
  } else {
    r.value = branch1;
    r.activeBranch = 1;
  }
  return r;
}

StabilityConstantResult stabilityConstantLimit(int n, double gamma) {
  if (n < 3) throw std::domain_error("stabilityConstantLimit: requires n >= 3");
  if (!(gamma > 0.0 && gamma < 1.0 / 9.0))
    throw std::domain_error("gamma must lie in (0,1/9)");
  const double wn = unitBallVolume(n);
  const double lam1 = gamma * (n - 2.0) / n;
  const double kap1 = lam1 / (4.0 * (1.0 + 2.0 * lam1));
  const double branch1 = 0.125;
  const double branch2 = kap1 * kap1 * c3Constant(n) * std::pow(M_PI, 0.5 * n) /
                         gammaFn(0.5 * (n + 2.0)) * 2.0 / (n * (n - 2.0) * wn * wn);
  StabilityConstantResult r;
  if (branch2 > branch1) {
    r.value = branch2;
    r.activeBranch = 2;
  } else {
    r.value = branch1;
    r.activeBranch = 1;
  }
  return r;
}

ConstantsTable makeConstantsTable(int n, double s, double gamma, double C4,
                                  std::optional<double> capsBallUnitRadius) {
  requireOrder(n, s);
  if (!(n > 2.0 * s)) throw std::domain_error("constants table requires n > 2s");
  ConstantsTable t;
  t.n = n;
  t.s = s;
  t.gamma = gamma;
  t.C4 = C4;
  t.omega_n = unitBallVolume(n);
  t.c_ns = poissonNormalization(n, s);
  t.alpha_ns = extensionConstant(n, s);
  t.c_n_iso = n >= 2 ? isoperimetricConstant(n) : 0.0;
  t.lambda = lambdaConstant(n, s, gamma);
  t.kappa = kappaConstant(n, s, gamma);
  t.C3 = c3Constant(n);
  t.capsBallUnitRadius = capsBallUnitRadius;
  if (capsBallUnitRadius) {
    auto r = stabilityConstant(n, s, C4, *capsBallUnitRadius, gamma);
    t.C_ns = r.value;
    t.C_ns_branch = r.activeBranch;
  }
  if (n >= 3) {
    t.C_n_limit = stabilityConstantLimit(n, gamma).value;
    t.capBUnitClassical = classicalBallCapacity(n);
  }
  return t;
}

std::string constantsTableToJson(const ConstantsTable& t) {
  nlohmann::ordered_json j;
  j["n"] = t.n;
  j["s"] = t.s;
  j["gamma"] = t.gamma;
  j["C4"] = t.C4;
  j["omega_n"] = t.omega_n;
  j["c_ns"] = t.c_ns;
  j["alpha_ns"] = t.alpha_ns;
  j["c_n_iso"] = t.c_n_iso;
  j["lambda"] = t.lambda;
  j["kappa"] = t.kappa;
  j["C3"] = t.C3;
  if (t.capsBallUnitRadius) j["capsBallUnitRadius"] = *t.capsBallUnitRadius;
  if (t.C_ns) {
    j["C_ns"] = *t.C_ns;
    j["C_ns_branch"] = *t.C_ns_branch;
  }
  if (t.C_n_limit) j["C_n_limit"] = *t.C_n_limit;
  if (t.capBUnitClassical) j["capB_unit_classical"] = *t.capBUnitClassical;
  return j.dump(2);
}

}  // namespace fracap
