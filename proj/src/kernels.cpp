#include "fracap/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "fracap/constants.hpp"
#include "fracap/quadrature.hpp"

namespace fracap {

namespace {

double clampPositive(double x) { return x > 1e-300 ? x : 1e-300; }

// ∫_0^A r^{1-2s} g(r) dr with the r^{1-2s} endpoint absorbed by substitution.
double radialSingularIntegral(double s, double A, const std::function<double(double)>& g) {
  const double e = 2.0 - 2.0 * s;
  auto f = [&](double xi) { return g(std::pow(xi, 1.0 / e)); };
  return integrate(f, 0.0, std::pow(A, e), 1e-9, 1e-13) / e;
}

struct TableKey {
  int n;
  long long sBits;
  bool operator<(const TableKey& o) const {
    return n != o.n ? n < o.n : sBits < o.sBits;
  }
};

}  // namespace

double angularKernel(int n, double p, double a, double b) {
  if (b < 0.0 || a <= b) throw std::domain_error("angularKernel: requires a > b >= 0");
  switch (n) {
    case 1:
      return std::pow(a - b, -p) + std::pow(a + b, -p);
    case 2: {
      if (b < 1e-14 * a) return 2.0 * M_PI * std::pow(a, -p);
      // int_0^pi (a - b cos t)^{-p} dt
      //   = 2 (a+b)^{-p} sigma^{1-2p} int_0^{pi/2} (cos^2 f + sigma^2 sin^2 f)^{p-1} df
      // with sigma^2 = (a-b)/(a+b); the transformed integrand is smooth and
      // bounded between sigma^{2p-2} and 1 for every peak width.
      const double sig2 = (a - b) / (a + b);
      auto f = [&](double ph) {
        const double c = std::cos(ph), sn = std::sin(ph);
        return std::pow(c * c + sig2 * sn * sn, p - 1.0);
      };
      const double core = integrate(f, 0.0, 0.5 * M_PI, 1e-9, 1e-13);
      return 2.0 * 2.0 * std::pow(a + b, -p) * std::pow(sig2, 0.5 - p) * core;
    }
    case 3: {
      if (b < 1e-14 * a) return 4.0 * M_PI * std::pow(a, -p);
      return 2.0 * M_PI * (std::pow(a - b, 1.0 - p) - std::pow(a + b, 1.0 - p)) /
             (b * (p - 1.0));
    }
    default:
      throw std::domain_error("angularKernel: n must be 1..3");
  }
}

namespace {

// ∫_1^inf r^{n-1} r^{-c} angular(q, r) dr for kernel power p = (n+2s)/2
double exteriorRadialIntegral(int n, double s, double q, double c) {
  const double p = 0.5 * (n + 2.0 * s);
  auto f = [&](double r) {
    const double a = q * q + r * r;
    const double b = 2.0 * q * r;
    return std::pow(r, n - 1 - c) * angularKernel(n, p, a, b);
  };
  // split near the sphere: the integrand is peaked at r = 1 when q -> 1
  const double relTol = 1e-8;
  return integrate(f, 1.0, 2.0, relTol, 1e-300) + integrateToInf(f, 2.0, relTol, 1e-300);
}

double exteriorExteriorEnergy(int n, double s) {
  const double p = 0.5 * (n + 2.0 * s);
  const double beta = n - 2.0 * s;
  const double sphere = n * unitBallVolume(n);
  auto inner = [&](double r) {
    auto g = [&](double rho) {
      const double d = std::pow(r, -beta) - std::pow(rho, -beta);
      if (d == 0.0) return 0.0;
      const double a = r * r + rho * rho;
      const double b = 2.0 * r * rho;
      return d * d * std::pow(rho, n - 1) * angularKernel(n, p, a, b);
    };
    // diagonal rho = r is an integrable singularity; split there
    double v = integrate(g, 1.0, r, 1e-6, 1e-11);
    v += integrate(g, r, std::max(2.0 * r, 4.0), 1e-6, 1e-11);
    v += integrateToInf(g, std::max(2.0 * r, 4.0), 1e-6, 1e-11);
    return v * std::pow(r, n - 1);
  };
  return sphere * (integrate(inner, 1.0, 4.0, 1e-5, 1e-9) +
                   integrateToInf(inner, 4.0, 1e-5, 1e-9));
}

ExteriorTables buildTables(int n, double s) {
  ExteriorTables t;
  t.n = n;
  t.s = s;
  t.beta = n - 2.0 * s;

  const int N = 160;
  const double uMin = 2e-5;
  t.uNodes.resize(N + 1);
  t.logTau.resize(N + 1);
  t.logSigma.resize(N + 1);
  t.logQq.resize(N + 1);
  for (int i = 0; i <= N; ++i) {
    // log-spaced u = 1-q from uMin up to 1 (q = 0)
    const double u = uMin * std::pow(1.0 / uMin, (double)i / N);
    const double q = 1.0 - u;
    t.uNodes[i] = u;
    t.logTau[i] = std::log(clampPositive(exteriorRadialIntegral(n, s, q, 0.0)));
    t.logSigma[i] = std::log(clampPositive(exteriorRadialIntegral(n, s, q, t.beta)));
    t.logQq[i] = std::log(clampPositive(exteriorRadialIntegral(n, s, q, 2.0 * t.beta)));
  }
  t.J = exteriorExteriorEnergy(n, s);
  return t;
}

double interpLog(const std::vector<double>& uNodes, const std::vector<double>& logVals,
                 double q) {
  const double u = std::clamp(1.0 - q, uNodes.front(), uNodes.back());
  const double lu = std::log(u);
  // uNodes are log-spaced: locate analytically
  const double l0 = std::log(uNodes.front()), l1 = std::log(uNodes.back());
  const double x = (lu - l0) / (l1 - l0) * (uNodes.size() - 1);
  const int i = std::clamp((int)x, 0, (int)uNodes.size() - 2);
  const double w = x - i;
  return std::exp(logVals[i] * (1.0 - w) + logVals[i + 1] * w);
}

}  // namespace

double ExteriorTables::tauHat(double q) const { return interpLog(uNodes, logTau, q); }
double ExteriorTables::sigmaHat(double q) const { return interpLog(uNodes, logSigma, q); }
double ExteriorTables::qqHat(double q) const { return interpLog(uNodes, logQq, q); }

const ExteriorTables& exteriorTables(int n, double s) {
  static std::map<TableKey, ExteriorTables> cache;
  static std::mutex mtx;
  TableKey key{n, (long long)std::llround(s * 1e12)};
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, buildTables(n, s)).first;
  return it->second;
}

double nearFieldMoment(int n, double s) {
  auto beta1 = [](double w) { return std::clamp(2.0 - std::abs(w), 0.0, 1.0); };
  switch (n) {
    case 1: {
      auto g = [&](double v) { return 2.0 * beta1(v); };
      return radialSingularIntegral(s, 2.0, g);
    }
    case 2: {
      auto g = [&](double r) {
        auto ang = [&](double th) {
          return beta1(r * std::cos(th)) * beta1(r * std::sin(th));
        };
        return 4.0 * integrate(ang, 0.0, 0.5 * M_PI, 1e-8, 1e-12);
      };
      return radialSingularIntegral(s, 2.0 * std::sqrt(2.0), g);
    }
    case 3: {
      auto g = [&](double r) {
        auto outer = [&](double th) {
          auto inner = [&](double ph) {
            return beta1(r * std::sin(th) * std::cos(ph)) *
                   beta1(r * std::sin(th) * std::sin(ph)) * beta1(r * std::cos(th));
          };
          return std::sin(th) * integrate(inner, 0.0, 0.5 * M_PI, 1e-7, 1e-11);
        };
        return 8.0 * integrate(outer, 0.0, 0.5 * M_PI, 1e-7, 1e-11);
      };
      return radialSingularIntegral(s, 2.0 * std::sqrt(3.0), g);
    }
    default:
      throw std::domain_error("nearFieldMoment: n must be 1..3");
  }
}

double nearFieldScale(int n, double s) {
  static std::map<TableKey, double> cache;
  static std::mutex mtx;
  TableKey key{n, (long long)std::llround(s * 1e12)};
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  // S = sum over offset-one lattice offsets of |d|^{-n-2s} d_1^2
  double S = 0.0;
  const int lo = -1, hi = 1;
  for (int dz = (n > 2 ? lo : 0); dz <= (n > 2 ? hi : 0); ++dz)
    for (int dy = (n > 1 ? lo : 0); dy <= (n > 1 ? hi : 0); ++dy)
      for (int dx = lo; dx <= hi; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const double d2 = (double)(dx * dx + dy * dy + dz * dz);
        S += std::pow(d2, -0.5 * (n + 2.0 * s)) * dx * dx;
      }
  const double omega = nearFieldMoment(n, s) / (n * S);
  cache.emplace(key, omega);
  return omega;
}

}  // namespace fracap
