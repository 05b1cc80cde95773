#include "fracap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "fracap/constants.hpp"
#include <json.hpp>

namespace fracap {

GridSpec autoGrid(const Shape& shape, const PipelineConfig& cfg) {
  GridSpec g;
  g.n = shape.n;
  g.m = cfg.m;
  g.R = cfg.truncationFactor * shape.circumRadiusAboutOrigin();
  return g;
}

// ---------------------------------------------------------------------------
// ball capacity cache

namespace {

std::map<std::string, double>& cacheMap() {
  static std::map<std::string, double> c;
  return c;
}
std::mutex& cacheMutex() {
  static std::mutex m;
  return m;
}

std::string cacheKey(int n, double s, int m, double rho, const std::string& method,
                     const PipelineConfig& cfg) {
  std::ostringstream k;
  k.precision(12);
  k << method << "|n=" << n << "|s=" << s << "|m=" << m << "|rho=" << rho
    << "|tol=" << cfg.solve.tol << "|far=" << cfg.solve.farField << "|zl=" << cfg.zLevels;
  return k.str();
}

}  // namespace

double unitBallCapacity(int n, double s, int m, double rho, const std::string& method,
                        const PipelineConfig& cfg) {
  const std::string key = cacheKey(n, s, m, rho, method, cfg);
  {
    std::lock_guard<std::mutex> lock(cacheMutex());
    auto it = cacheMap().find(key);
    if (it != cacheMap().end()) return it->second;
  }
  Shape ball = Shape::ball(n, {0, 0, 0}, 1.0);
  GridSpec grid{n, m, rho};
  double value = 0.0;
  if (method == "extension") {
    value = fracCapacityExtension(ball, s, grid, rho, cfg.zLevels, cfg.solve).cap.value;
  } else {
    value = fracCapacityDirect(ball, s, grid, cfg.solve).value;
  }
  std::lock_guard<std::mutex> lock(cacheMutex());
  cacheMap().emplace(key, value);
  return value;
}

std::string ballCacheDump() {
  std::lock_guard<std::mutex> lock(cacheMutex());
  nlohmann::ordered_json j;
  for (const auto& [k, v] : cacheMap()) j[k] = v;
  return j.dump(2);
}

void ballCacheLoad(const std::string& json) {
  auto j = nlohmann::json::parse(json);
  std::lock_guard<std::mutex> lock(cacheMutex());
  for (auto it = j.begin(); it != j.end(); ++it)
    cacheMap()[it.key()] = it.value().get<double>();
}

// ---------------------------------------------------------------------------
// deficit

DeficitResult deficitResult(const Shape& shape, double s, const PipelineConfig& cfg,
                            const std::string& method) {
  const int n = shape.n;
  DeficitResult res;
  res.grid = autoGrid(shape, cfg);
  const double rho = res.grid.R / shape.circumRadiusAboutOrigin();

  if (method == "extension") {
    auto sol = fracCapacityExtension(shape, s, res.grid,
                                     cfg.Z > 0 ? cfg.Z : res.grid.R, cfg.zLevels, cfg.solve);
    res.raw = sol.cap;
  } else {
    res.raw = fracCapacityDirect(shape, s, res.grid, cfg.solve);
  }
  res.capacity = res.raw.value;

  auto mask = rasterizeOnGrid(shape, res.grid);
  std::size_t cnt = 0;
  for (auto v : mask) cnt += v;
  res.volume = (double)cnt * std::pow(res.grid.h(), n);
  if (!(res.volume > 0.0)) throw std::domain_error("deficit: shape has zero volume");

  res.capBallUnitRadius = unitBallCapacity(n, s, cfg.m, rho, method, cfg);
  const double wn = unitBallVolume(n);
  // |B|^{(2s-n)/n} cap_s(B) for the unit-radius ball: |B| = omega_n
  res.normalizedBall = std::pow(wn, (2.0 * s - n) / n) * res.capBallUnitRadius;
  res.deficit = std::pow(res.volume, (2.0 * s - n) / n) * res.capacity / res.normalizedBall - 1.0;
  res.asymmetry = fraenkelAsymmetry(shape, res.grid.h()).value;
  return res;
}

double deficit(const Shape& shape, double s, const PipelineConfig& cfg,
               const std::string& method) {
  return deficitResult(shape, s, cfg, method).deficit;
}

// ---------------------------------------------------------------------------
// threshold

TraceThreshold thresholdFromTrace(const GridFunction& trace, double volume, double gamma,
                                  double asymmetry) {
  TraceThreshold out;
  const double cellVol = std::pow(trace.grid.h(), trace.grid.n);
  std::vector<double> vals(trace.values);
  std::sort(vals.begin(), vals.end());
  const double target = volume * (1.0 + gamma * asymmetry);
  const int NT = 512;
  for (int k = 1; k < NT; ++k) {
    const double t = (double)k / NT;
    auto it = std::lower_bound(vals.begin(), vals.end(), t);
    const double mu = (double)(vals.end() - it) * cellVol;
    if (mu <= target) {
      out.T = t;
      out.muT = mu;
      break;
    }
  }
  out.hatT = 1.0 - out.T;
  return out;
}

// ---------------------------------------------------------------------------
// stability

StabilityReport verifyStability(const Shape& shape, double s, const PipelineConfig& cfg,
                                const std::string& method, const std::string& shapeId) {
  const int n = shape.n;
  StabilityReport rep;
  rep.shapeId = shapeId;
  rep.n = n;
  rep.s = s;
  rep.gamma = cfg.gamma;
  rep.C4 = cfg.C4;
  rep.tolerance = cfg.assertTol;
  rep.kappa = kappaConstant(n, s, cfg.gamma);

  DeficitResult base = deficitResult(shape, s, cfg, "direct");
  rep.capDirect = base.capacity;
  rep.deficit = base.deficit;
  rep.volume = base.volume;
  rep.asymmetry = base.asymmetry;
  rep.capBallUnitRadius = base.capBallUnitRadius;
  const double wn = unitBallVolume(n);
  const double rEq = std::pow(base.volume / wn, 1.0 / n);
  rep.ballCapacityEqualVolume = std::pow(rEq, n - 2.0 * s) * base.capBallUnitRadius;

  if (method == "both" || method == "extension") {
    auto sol = fracCapacityExtension(shape, s, base.grid, cfg.Z > 0 ? cfg.Z : base.grid.R,
                                     cfg.zLevels, cfg.solve);
    rep.capExtension = sol.cap.value;
  }

  auto C = stabilityConstant(n, s, cfg.C4, base.capBallUnitRadius, cfg.gamma);
  rep.stabilityConstantValue = C.value;
  rep.stabilityConstantBranch = C.activeBranch;
  rep.rhsConditional = C.activeBranch == 2;
  rep.rhs = C.value * std::pow(rep.asymmetry, 3.0 / s);

  // branch classification through the trace threshold
  TraceThreshold th{1.0, 0.0, 0.0};
  if (rep.asymmetry > 0.0)
    th = thresholdFromTrace(base.raw.potential, base.volume, cfg.gamma, rep.asymmetry);
  rep.T = th.T;
  rep.hatT = th.hatT;
  if (rep.asymmetry <= 0.0)
    rep.branch = "rigid";
  else if (th.hatT >= rep.kappa * rep.asymmetry)
    rep.branch = "largeGap";
  else
    rep.branch = "smallGap";

  // unconditional first-branch fact: cap_s(Omega) > 2 cap_s(B_eqvol) forces
  // d >= 2^{-3/s} A^{3/s}
  rep.unconditionalApplicable = rep.deficit > 1.0;
  rep.unconditionalMargin =
      rep.deficit - std::pow(2.0, -3.0 / s) * std::pow(rep.asymmetry, 3.0 / s);
  rep.conditionalMargin = rep.deficit - rep.rhs;

  if (rep.branch == "smallGap") {
    // test-function chain: cap_s(Omega) >= T^2 cap_s(B) |Omega_T|^{(n-2s)/n}
    // in unit-volume normalization
    const double capHat = std::pow(base.volume, (2.0 * s - n) / n) * rep.capDirect;
    const double muHat = th.muT / base.volume;
    const double rhsChain =
        th.T * th.T * base.normalizedBall * std::pow(muHat, (n - 2.0 * s) / n);
    rep.smallGapChainMargin = capHat - rhsChain;
  }

  bool ok = true;
  if (rep.branch == "rigid") {
    ok = std::abs(rep.deficit) <= rep.tolerance;
  } else {
    if (rep.unconditionalApplicable)
      ok = ok && rep.unconditionalMargin >= -rep.tolerance;
    if (!rep.rhsConditional) ok = ok && rep.conditionalMargin >= -rep.tolerance;
    ok = ok && rep.deficit >= -rep.tolerance;
  }
  rep.passed = ok;
  return rep;
}

// ---------------------------------------------------------------------------
// sharpness scan

ScanReport sharpnessScan(const std::vector<std::pair<std::string, Shape>>& family, double s,
                         const PipelineConfig& cfg) {
  ScanReport rep;
  for (const auto& [name, shape] : family) {
    StabilityReport r = verifyStability(shape, s, cfg, "direct", name);
    ScanRow row;
    row.name = name;
    row.A = r.asymmetry;
    row.d = r.deficit;
    row.rhs = r.rhs;
    row.margin = r.conditionalMargin;
    row.branch = r.branch;
    rep.rows.push_back(row);
  }
  std::vector<std::pair<double, double>> pts;  // (log A, log d)
  for (const auto& r : rep.rows)
    if (r.A > 1e-12 && r.d > 1e-12) pts.emplace_back(std::log(r.A), std::log(r.d));
  double amin = 1e300, amax = -1e300;
  for (const auto& p : pts) {
    amin = std::min(amin, p.first);
    amax = std::max(amax, p.first);
  }
  if (pts.size() < 2 || amax - amin < 1e-9) {
    rep.degenerate = true;
    return rep;
  }
  rep.underdetermined = pts.size() == 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double K = (double)pts.size();
  const double denom = K * sxx - sx * sx;
  rep.exponent = (K * sxy - sx * sy) / denom;
  rep.prefactor = std::exp((sy - rep.exponent * sx) / K);
  rep.fitDone = true;
  return rep;
}

}  // namespace fracap
