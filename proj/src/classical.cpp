#include "fracap/classical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fracap/constants.hpp"
#include "fracap/det.hpp"
#include "fracap/pcg.hpp"

namespace fracap {

namespace {

struct LocalProblem {
  const GridSpec* g = nullptr;
  double h = 0.0;
  std::vector<std::uint8_t> active;    // centers strictly inside the sphere R
  std::vector<std::uint8_t> inShape;   // constrained u = 1
  std::vector<std::uint8_t> freeDof;
  std::vector<int> extFaces;           // number of exterior faces per cell
  std::vector<double> ghostSum;        // sum of ghost values over those faces
  std::vector<double> ghostSqSum;      // sum of squared ghost values
};

// y = h (L + diag(extFaces)) x restricted to free cells
void applyLocal(const LocalProblem& lp, const std::vector<double>& x, std::vector<double>& y) {
  const GridSpec& g = *lp.g;
  const std::size_t N = g.cells();
  y.assign(N, 0.0);
  const std::size_t strides[3] = {1, (std::size_t)g.m, (std::size_t)g.m * g.m};
#pragma omp parallel for schedule(static)
  for (long long ii = 0; ii < (long long)N; ++ii) {
    const std::size_t i = (std::size_t)ii;
    if (!lp.freeDof[i]) continue;
    const auto idx = g.unflatten(i);
    double acc = (double)lp.extFaces[i] * x[i];
    for (int k = 0; k < 3; ++k) {
      if (idx[k] > 0 && lp.active[i - strides[k]]) acc += x[i] - x[i - strides[k]];
      if (idx[k] < g.m - 1 && lp.active[i + strides[k]]) acc += x[i] - x[i + strides[k]];
    }
    y[i] = lp.h * acc;
  }
}

double localEnergy(const LocalProblem& lp, const std::vector<double>& u) {
  const GridSpec& g = *lp.g;
  const std::size_t N = g.cells();
  const std::size_t strides[3] = {1, (std::size_t)g.m, (std::size_t)g.m * g.m};
  return deterministicSum(N, [&](std::size_t i) {
    if (!lp.active[i]) return 0.0;
    const auto idx = g.unflatten(i);
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) {
      if (idx[k] < g.m - 1 && lp.active[i + strides[k]]) {
        const double d = u[i] - u[i + strides[k]];
        acc += d * d;
      }
    }
    acc += lp.extFaces[i] * u[i] * u[i] - 2.0 * u[i] * lp.ghostSum[i] + lp.ghostSqSum[i];
    return lp.h * acc;
  });
}

// solve with the current ghost values; returns u on the full grid
std::vector<double> solvePass(const LocalProblem& lp, const SolveOptions& opt,
                              PcgOutcome& cgOut) {
  const GridSpec& g = *lp.g;
  const std::size_t N = g.cells();
  // rhs: shape neighbors contribute u = 1, exterior faces contribute ghosts
  std::vector<double> b(N, 0.0);
  const std::size_t strides[3] = {1, (std::size_t)g.m, (std::size_t)g.m * g.m};
  for (std::size_t i = 0; i < N; ++i) {
    if (!lp.freeDof[i]) continue;
    const auto idx = g.unflatten(i);
    double acc = lp.ghostSum[i];
    for (int k = 0; k < 3; ++k) {
      if (idx[k] > 0 && lp.inShape[i - strides[k]]) acc += 1.0;
      if (idx[k] < g.m - 1 && lp.inShape[i + strides[k]]) acc += 1.0;
    }
    b[i] = lp.h * acc;
  }
  std::vector<double> diag(N, 1.0);
  for (std::size_t i = 0; i < N; ++i) {
    if (!lp.freeDof[i]) continue;
    const auto idx = g.unflatten(i);
    int deg = lp.extFaces[i];
    for (int k = 0; k < 3; ++k) {
      if (idx[k] > 0 && lp.active[i - strides[k]]) ++deg;
      if (idx[k] < g.m - 1 && lp.active[i + strides[k]]) ++deg;
    }
    diag[i] = lp.h * std::max(1, deg);
  }
  auto applyA = [&](const std::vector<double>& x, std::vector<double>& y) {
    std::vector<double> xm(x);
    for (std::size_t i = 0; i < N; ++i)
      if (!lp.freeDof[i]) xm[i] = 0.0;
    applyLocal(lp, xm, y);
    for (std::size_t i = 0; i < N; ++i)
      if (!lp.freeDof[i]) y[i] = 0.0;
  };
  auto prec = [&](const std::vector<double>& r, std::vector<double>& z) {
    z.resize(N);
    for (std::size_t i = 0; i < N; ++i) z[i] = lp.freeDof[i] ? r[i] / diag[i] : 0.0;
  };
  std::size_t freeCount = 0;
  for (auto f : lp.freeDof) freeCount += f;
  const int maxIter = std::max(300, (int)(opt.maxIterScale * std::sqrt((double)freeCount)));
  std::vector<double> x(N, 0.0);
  cgOut = pcg(N, applyA, prec, b, x, opt.tol, maxIter);
  if (!cgOut.converged) {
    std::ostringstream msg;
    msg << "classicalCapacity: CG did not converge, residual=" << cgOut.relResidual;
    throw std::runtime_error(msg.str());
  }
  for (std::size_t i = 0; i < N; ++i)
    if (lp.inShape[i]) x[i] = 1.0;
  return x;
}

double fitMonopole(const LocalProblem& lp, const std::vector<double>& u) {
  const GridSpec& g = *lp.g;
  const std::size_t N = g.cells();
  const double num = deterministicSum(N, [&](std::size_t i) {
    if (!lp.active[i] || lp.inShape[i]) return 0.0;
    const double r = g.centerRadius(i);
    if (r < 0.60 * g.R || r > 0.85 * g.R) return 0.0;
    return u[i] / r;
  });
  const double den = deterministicSum(N, [&](std::size_t i) {
    if (!lp.active[i] || lp.inShape[i]) return 0.0;
    const double r = g.centerRadius(i);
    if (r < 0.60 * g.R || r > 0.85 * g.R) return 0.0;
    return 1.0 / (r * r);
  });
  return den > 0.0 ? num / den : 0.0;
}

void setGhosts(LocalProblem& lp, double c) {
  const GridSpec& g = *lp.g;
  const std::size_t N = g.cells();
  const std::size_t strides[3] = {1, (std::size_t)g.m, (std::size_t)g.m * g.m};
  lp.ghostSum.assign(N, 0.0);
  lp.ghostSqSum.assign(N, 0.0);
  if (c == 0.0) return;
  for (std::size_t i = 0; i < N; ++i) {
    if (!lp.active[i] || lp.extFaces[i] == 0) continue;
    const auto idx = g.unflatten(i);
    const Point p = g.center(idx);
    for (int k = 0; k < 3; ++k) {
      for (int sgn : {-1, 1}) {
        auto nb = idx;
        nb[k] += sgn;
        bool outside = nb[k] < 0 || nb[k] >= g.m;
        std::size_t nbf = 0;
        if (!outside) {
          nbf = i + (std::size_t)sgn * strides[k];
          outside = !lp.active[nbf];
        }
        if (!outside) continue;
        Point q = p;
        q[k] += sgn * g.h();  // ghost center
        const double r = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]);
        const double val = c / r;
        lp.ghostSum[i] += val;
        lp.ghostSqSum[i] += val * val;
      }
    }
  }
}

}  // namespace

CapacityResult classicalCapacity(const Shape& shape, const GridSpec& grid,
                                 const SolveOptions& opt) {
  shape.validate();
  if (grid.n != 3 || shape.n != 3)
    throw std::domain_error("classicalCapacity: unsupported dimension (n must be 3)");
  if (shape.circumRadiusAboutOrigin() > 0.9 * grid.R)
    throw std::runtime_error("truncation too small: shape not strictly inside the box");

  LocalProblem lp;
  lp.g = &grid;
  lp.h = grid.h();
  const std::size_t N = grid.cells();
  lp.active.assign(N, 0);
  for (std::size_t i = 0; i < N; ++i) lp.active[i] = grid.centerRadius(i) < grid.R ? 1 : 0;
  lp.inShape = rasterizeOnGrid(shape, grid);
  std::size_t constrained = 0;
  for (std::size_t i = 0; i < N; ++i) {
    lp.inShape[i] = lp.inShape[i] && lp.active[i];
    constrained += lp.inShape[i];
  }
  if (constrained == 0)
    throw std::domain_error("degenerate shape: no cells at this resolution");
  lp.freeDof.assign(N, 0);
  for (std::size_t i = 0; i < N; ++i) lp.freeDof[i] = lp.active[i] && !lp.inShape[i];

  lp.extFaces.assign(N, 0);
  const std::size_t strides[3] = {1, (std::size_t)grid.m, (std::size_t)grid.m * grid.m};
  for (std::size_t i = 0; i < N; ++i) {
    if (!lp.active[i]) continue;
    const auto idx = grid.unflatten(i);
    int faces = 0;
    for (int k = 0; k < 3; ++k) {
      if (idx[k] == 0 || !lp.active[i - strides[k]]) ++faces;
      if (idx[k] == grid.m - 1 || !lp.active[i + strides[k]]) ++faces;
    }
    lp.extFaces[i] = faces;
  }

  // pass 1: grounded outer boundary; pass 2: inverted-multipole ghosts
  setGhosts(lp, 0.0);
  PcgOutcome cg1, cg2;
  std::vector<double> u = solvePass(lp, opt, cg1);
  double c = fitMonopole(lp, u);
  setGhosts(lp, c);
  u = solvePass(lp, opt, cg2);
  c = fitMonopole(lp, u);
  setGhosts(lp, c);

  double violation = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    if (lp.active[i]) violation = std::max(violation, std::max(u[i] - 1.0, -u[i]));
  const double rawE = localEnergy(lp, u);
  std::vector<double> uc(u);
  for (auto& v : uc) v = std::clamp(v, 0.0, 1.0);
  const double clipE = localEnergy(lp, uc);
  if (clipE > rawE * (1.0 + 1e-9) + 1e-12)
    throw std::logic_error("clipping increased the classical energy");

  const double exterior = 4.0 * M_PI * c * c / grid.R;

  CapacityResult res;
  res.energy = clipE + exterior;
  res.value = res.energy;
  res.residual = cg2.relResidual;
  res.h = grid.h();
  res.R = grid.R;
  res.iterations = cg1.iterations + cg2.iterations;
  res.method = "classical";
  res.farAmplitude = c;
  res.maxPrincipleViolation = std::max(violation, 0.0);
  res.potential = GridFunction(grid, 1.0);
  res.potential.values = std::move(uc);
  return res;
}

SweepReport asymptoticSweep(const Shape& shape, const std::vector<double>& sLadder,
                            const GridSpec& grid, double upperTol, const SolveOptions& opt) {
  if (shape.kind != Shape::Kind::Ball && shape.kind != Shape::Kind::Box)
    throw std::domain_error("asymptoticSweep: shape must be a ball or a box");
  if (grid.n != 3) throw std::domain_error("asymptoticSweep: n must be 3");
  if (sLadder.empty()) throw std::domain_error("asymptoticSweep: empty ladder");
  for (double s : sLadder)
    if (!(s > 0.5 && s < 0.97))
      throw std::domain_error("asymptoticSweep: ladder must lie in (0.5, 0.97)");

  SweepReport rep;
  rep.upperTol = upperTol;
  rep.classicalCap = classicalCapacity(shape, grid, opt).value;
  rep.target = 0.5 * unitBallVolume(3) * rep.classicalCap;

  std::vector<double> ladder(sLadder);
  std::sort(ladder.begin(), ladder.end());
  for (double s : ladder) {
    SweepPoint p;
    p.s = s;
    p.caps = fracCapacityDirect(shape, s, grid, opt).value;
    p.scaled = (1.0 - s) * p.caps;
    if (s >= 0.8) p.upperBoundOk = p.scaled <= rep.target * (1.0 + upperTol);
    rep.points.push_back(p);
  }

  if (ladder.size() >= 3) {
    // linear fit of (1-s) cap_s against x = 1-s over the three largest s
    const std::size_t K = rep.points.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = K - 3; i < K; ++i) {
      const double x = 1.0 - rep.points[i].s;
      const double y = rep.points[i].scaled;
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double denom = 3.0 * sxx - sx * sx;
    rep.limitEstimate = (sy * sxx - sx * sxy) / denom;
    rep.extrapolated = true;
    rep.relError = std::abs(rep.limitEstimate - rep.target) / rep.target;
  }
  return rep;
}

}  // namespace fracap
