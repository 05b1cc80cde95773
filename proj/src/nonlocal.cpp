#include "fracap/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fracap/constants.hpp"
#include "fracap/det.hpp"
#include "fracap/kernels.hpp"
#include "fracap/pcg.hpp"
#include "fracap/quadrature.hpp"

namespace fracap {

// ---------------------------------------------------------------------------
// PCG

PcgOutcome pcg(std::size_t N,
               const std::function<void(const std::vector<double>&, std::vector<double>&)>& applyA,
               const std::function<void(const std::vector<double>&, std::vector<double>&)>& prec,
               const std::vector<double>& b, std::vector<double>& x, double tol, int maxIter) {
  std::vector<double> r(N), z(N), p(N), q(N);
  applyA(x, q);
  for (std::size_t i = 0; i < N; ++i) r[i] = b[i] - q[i];
  const double bNorm = std::sqrt(dotDet(b, b));
  PcgOutcome out;
  if (bNorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    out.converged = true;
    return out;
  }
  prec(r, z);
  p = z;
  double rz = dotDet(r, z);
  for (int it = 0; it < maxIter; ++it) {
    applyA(p, q);
    const double pq = dotDet(p, q);
    if (pq <= 0.0) break;  // loss of positivity; bail with current iterate
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < N; ++i) x[i] += alpha * p[i];
    for (std::size_t i = 0; i < N; ++i) r[i] -= alpha * q[i];
    out.iterations = it + 1;
    out.relResidual = std::sqrt(dotDet(r, r)) / bNorm;
    if (out.relResidual <= tol) {
      out.converged = true;
      return out;
    }
    prec(r, z);
    const double rzNew = dotDet(r, z);
    const double beta = rzNew / rz;
    rz = rzNew;
    for (std::size_t i = 0; i < N; ++i) p[i] = z[i] + beta * p[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// field helpers

ZGrid ZGrid::graded(double Z, int M, double s) {
  if (!(Z > 0.0) || M < 1) throw std::domain_error("ZGrid: bad parameters");
  ZGrid g;
  g.Z = Z;
  g.M = M;
  g.levels.resize(M + 1);
  const double e = 1.0 / (1.0 - s);
  for (int j = 0; j <= M; ++j) g.levels[j] = Z * std::pow((double)j / M, e);
  return g;
}

ZGrid ZGrid::fromLevels(std::vector<double> zs) {
  if (zs.empty() || zs.front() != 0.0) throw std::domain_error("ZGrid: levels must start at 0");
  for (std::size_t j = 1; j < zs.size(); ++j)
    if (!(zs[j] > zs[j - 1])) throw std::domain_error("ZGrid: levels must ascend");
  ZGrid g;
  g.Z = zs.back();
  g.M = (int)zs.size() - 1;
  g.levels = std::move(zs);
  return g;
}

GridFunction ExtensionField::slice(int j) const {
  GridFunction f(grid, s);
  const int L = levelCount();
  for (std::size_t c = 0; c < grid.cells(); ++c) f.values[c] = values[c * L + j];
  return f;
}

// ---------------------------------------------------------------------------
// NonlocalForm

NonlocalForm::NonlocalForm(const GridSpec& g, double s, std::vector<std::uint8_t> active,
                           double extRadius, bool farField)
    : grid_(g), s_(s), active_(std::move(active)), extRadius_(extRadius), farField_(farField) {
  if (active_.size() != grid_.cells()) throw std::invalid_argument("active mask size mismatch");
  const int n = grid_.n;
  const double h = grid_.h();
  const std::size_t N = grid_.cells();

  std::array<int, 3> dims{grid_.m, grid_.m, grid_.m};
  conv_ = std::make_unique<Convolver>(n, dims);
  const double omega = nearFieldScale(n, s);
  const double pw = -0.5 * (n + 2.0 * s);
  const double h2n = std::pow(h, 2 * n);
  conv_->setKernel([&](const std::array<int, 3>& d) -> double {
    const int ax = std::abs(d[0]), ay = std::abs(d[1]), az = std::abs(d[2]);
    const int linf = std::max({ax, ay, az});
    if (linf == 0) return 0.0;
    const double r2 = (double)(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) * h * h;
    double w = h2n * std::pow(r2, pw);
    if (linf == 1) w *= omega;
    return w;
  });

  std::vector<double> act(N);
  for (std::size_t i = 0; i < N; ++i) act[i] = active_[i] ? 1.0 : 0.0;
  conv_->apply(act, wTot_);

  const auto& T = exteriorTables(n, s);
  const double scale = std::pow(extRadius_, -2.0 * s) * std::pow(h, n);
  tail_.assign(N, 0.0);
  sigma_.assign(N, 0.0);
  double qqSum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    if (!active_[i]) continue;
    const double q = grid_.centerRadius(i) / extRadius_;
    tail_[i] = scale * T.tauHat(q);
    if (farField_) {
      sigma_[i] = scale * T.sigmaHat(q);
      qqSum += scale * T.qqHat(q);
    }
  }
  if (farField_) Mgg_ = 2.0 * qqSum + std::pow(extRadius_, n - 2.0 * s) * T.J;

  diagU_.assign(N, 1.0);
  for (std::size_t i = 0; i < N; ++i)
    if (active_[i]) diagU_[i] = 2.0 * (wTot_[i] + tail_[i]);
  diagG_ = farField_ ? Mgg_ : 1.0;
}

void NonlocalForm::convolve(const std::vector<double>& u, std::vector<double>& out) const {
  std::vector<double> masked(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) masked[i] = active_[i] ? u[i] : 0.0;
  conv_->apply(masked, out);
}

double NonlocalForm::energy(const std::vector<double>& u, double g) const {
  std::vector<double> Wu;
  convolve(u, Wu);
  const std::size_t N = u.size();
  const double pairPart = deterministicSum(N, [&](std::size_t i) {
    if (!active_[i]) return 0.0;
    return 2.0 * (wTot_[i] * u[i] - Wu[i]) * u[i];
  });
  const double tailPart = deterministicSum(N, [&](std::size_t i) {
    if (!active_[i]) return 0.0;
    return 2.0 * tail_[i] * u[i] * u[i];
  });
  double farPart = 0.0;
  if (farField_) {
    const double su = deterministicSum(N, [&](std::size_t i) {
      return active_[i] ? sigma_[i] * u[i] : 0.0;
    });
    farPart = -4.0 * g * su + g * g * Mgg_;
  }
  return pairPart + tailPart + farPart;
}

void NonlocalForm::applyM(const std::vector<double>& u, double g, std::vector<double>& outU,
                          double& outG) const {
  std::vector<double> Wu;
  convolve(u, Wu);
  const std::size_t N = u.size();
  outU.resize(N);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < (long long)N; ++i) {
    if (!active_[i]) {
      outU[i] = 0.0;
      continue;
    }
    outU[i] = 2.0 * (wTot_[i] * u[i] - Wu[i]) + 2.0 * tail_[i] * u[i] - 2.0 * sigma_[i] * g;
  }
  if (farField_) {
    const double su = deterministicSum(N, [&](std::size_t i) {
      return active_[i] ? sigma_[i] * u[i] : 0.0;
    });
    outG = -2.0 * su + Mgg_ * g;
  } else {
    outG = 0.0;
  }
}

// ---------------------------------------------------------------------------
// seminorm

double gagliardoSeminorm(const GridFunction& u) {
  const GridSpec& g = u.grid;
  const int n = g.n;
  for (std::size_t i = 0; i < g.cells(); ++i) {
    auto idx = g.unflatten(i);
    bool boundary = false;
    for (int k = 0; k < n; ++k) boundary = boundary || idx[k] == 0 || idx[k] == g.m - 1;
    if (boundary && u.values[i] != 0.0)
      throw std::runtime_error("truncation too small: support touches the boundary layer");
  }
  NonlocalForm form(g, u.s, std::vector<std::uint8_t>(g.cells(), 1),
                    g.R * std::sqrt((double)n), /*farField=*/false);
  return form.energy(u.values, 0.0);
}

// ---------------------------------------------------------------------------
// direct capacity

CapacityResult fracCapacityDirect(const Shape& shape, double s, const GridSpec& grid,
                                  const SolveOptions& opt) {
  shape.validate();
  if (shape.n != grid.n) throw std::domain_error("shape/grid dimension mismatch");
  if (!(grid.n > 2.0 * s)) throw std::domain_error("fracCapacityDirect: requires n > 2s");
  if (shape.circumRadiusAboutOrigin() > 0.9 * grid.R)
    throw std::runtime_error("truncation too small: shape not strictly inside the box");

  const std::size_t N = grid.cells();
  std::vector<std::uint8_t> active(N, 0);
  for (std::size_t i = 0; i < N; ++i) active[i] = grid.centerRadius(i) < grid.R ? 1 : 0;

  std::vector<std::uint8_t> inShape = rasterizeOnGrid(shape, grid);
  std::size_t constrained = 0;
  for (std::size_t i = 0; i < N; ++i) {
    inShape[i] = inShape[i] && active[i];
    constrained += inShape[i];
  }
  if (constrained == 0)
    throw std::domain_error("degenerate shape: no cells at this resolution");

  NonlocalForm form(grid, s, active, grid.R, opt.farField);

  // bordered vector layout: [cells..., g]
  const std::size_t NB = N + 1;
  std::vector<std::uint8_t> freeDof(NB, 0);
  for (std::size_t i = 0; i < N; ++i) freeDof[i] = active[i] && !inShape[i];
  freeDof[N] = opt.farField ? 1 : 0;

  std::vector<double> xFixed(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) xFixed[i] = inShape[i] ? 1.0 : 0.0;

  std::vector<double> mU(N);
  double mG = 0.0;
  form.applyM(xFixed, 0.0, mU, mG);
  std::vector<double> b(NB, 0.0);
  for (std::size_t i = 0; i < N; ++i) b[i] = freeDof[i] ? -mU[i] : 0.0;
  b[N] = freeDof[N] ? -mG : 0.0;

  auto applyA = [&](const std::vector<double>& x, std::vector<double>& y) {
    std::vector<double> u(x.begin(), x.begin() + N);
    for (std::size_t i = 0; i < N; ++i)
      if (!freeDof[i]) u[i] = 0.0;
    const double g = freeDof[N] ? x[N] : 0.0;
    std::vector<double> outU;
    double outG = 0.0;
    form.applyM(u, g, outU, outG);
    y.resize(NB);
    for (std::size_t i = 0; i < N; ++i) y[i] = freeDof[i] ? outU[i] : 0.0;
    y[N] = freeDof[N] ? outG : 0.0;
  };
  auto prec = [&](const std::vector<double>& r, std::vector<double>& z) {
    z.resize(NB);
    for (std::size_t i = 0; i < N; ++i)
      z[i] = freeDof[i] ? r[i] / form.diagU()[i] : 0.0;
    z[N] = freeDof[N] ? r[N] / form.diagG() : 0.0;
  };

  std::size_t freeCount = 0;
  for (auto f : freeDof) freeCount += f;
  const int maxIter = std::max(200, (int)(opt.maxIterScale * std::sqrt((double)freeCount)));

  std::vector<double> x(NB, 0.0);
  PcgOutcome cg = pcg(NB, applyA, prec, b, x, opt.tol, maxIter);
  if (!cg.converged) {
    std::ostringstream msg;
    msg << "fracCapacityDirect: CG did not converge, residual=" << cg.relResidual;
    throw std::runtime_error(msg.str());
  }

  std::vector<double> u(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) u[i] = inShape[i] ? 1.0 : (freeDof[i] ? x[i] : 0.0);
  const double gFar = freeDof[N] ? x[N] : 0.0;

  double violation = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    violation = std::max(violation, std::max(u[i] - 1.0, -u[i]));
  }
  const double rawEnergy = form.energy(u, gFar);
  std::vector<double> uc(u);
  for (auto& v : uc) v = std::clamp(v, 0.0, 1.0);
  const double clipEnergy = form.energy(uc, gFar);
  if (clipEnergy > rawEnergy * (1.0 + 1e-9) + 1e-12)
    throw std::logic_error("clipping increased the energy; form assembly is inconsistent");

  CapacityResult res;
  res.value = clipEnergy;
  res.energy = clipEnergy;
  res.residual = cg.relResidual;
  res.h = grid.h();
  res.R = grid.R;
  res.iterations = cg.iterations;
  res.method = "direct";
  res.farAmplitude = gFar;
  res.maxPrincipleViolation = std::max(violation, 0.0);
  res.potential = GridFunction(grid, s);
  res.potential.values = std::move(uc);
  return res;
}

// ---------------------------------------------------------------------------
// Poisson extension

namespace {

// lattice normalization: h^n sum_d P_z(dh) over |dh| <= rho plus the radial
// remainder integral beyond rho
double latticeMass(int n, double s, double h, double z, int m) {
  const double cns = poissonNormalization(n, s);
  const double p = 0.5 * (n + 2.0 * s);
  const int D = 2 * m;
  const double rho = D * h;
  const double z2 = z * z;
  double sum = 0.0;
  const long long Dz = n > 2 ? D : 0, Dy = n > 1 ? D : 0;
  for (long long dz = -Dz; dz <= Dz; ++dz)
    for (long long dy = -Dy; dy <= Dy; ++dy)
      for (long long dx = -D; dx <= D; ++dx) {
        const double r2 = (double)(dx * dx + dy * dy + dz * dz) * h * h;
        if (r2 > rho * rho) continue;
        sum += std::pow(r2 + z2, -p);
      }
  sum *= cns * std::pow(z, 2.0 * s) * std::pow(h, n);
  const double sphere = n * unitBallVolume(n);
  auto f = [&](double r) { return std::pow(r, n - 1) * std::pow(r * r + z2, -p); };
  const double remainder =
      cns * std::pow(z, 2.0 * s) * sphere * integrateToInf(f, rho, 1e-10, 1e-300);
  return sum + remainder;
}

}  // namespace

ExtensionField poissonExtend(const GridFunction& phi, const std::vector<double>& zLevels,
                             double exteriorValue) {
  const GridSpec& g = phi.grid;
  const int n = g.n;
  const double s = phi.s;
  const double h = g.h();
  std::vector<double> zs{0.0};
  for (double z : zLevels) {
    if (!(z > 0.0)) throw std::domain_error("poissonExtend: z levels must be positive");
    zs.push_back(z);
  }
  std::sort(zs.begin() + 1, zs.end());
  ExtensionField field(g, s, ZGrid::fromLevels(zs));

  const std::size_t N = g.cells();
  const int L = field.levelCount();
  for (std::size_t c = 0; c < N; ++c) field.at(c, 0) = phi.values[c];

  std::vector<double> shifted(N);
  for (std::size_t c = 0; c < N; ++c) shifted[c] = phi.values[c] - exteriorValue;

  Convolver conv(n, {g.m, g.m, g.m});
  const double cns = poissonNormalization(n, s);
  const double p = 0.5 * (n + 2.0 * s);
  std::vector<double> out;
  for (int j = 1; j < L; ++j) {
    const double z = field.z.levels[j];
    const double nu = latticeMass(n, s, h, z, g.m);
    const double pref = cns * std::pow(z, 2.0 * s) * std::pow(h, n) / nu;
    conv.setKernel([&](const std::array<int, 3>& d) {
      const double r2 = (double)(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) * h * h;
      return pref * std::pow(r2 + z * z, -p);
    });
    conv.apply(shifted, out);
    for (std::size_t c = 0; c < N; ++c) field.at(c, j) = out[c] + exteriorValue;
  }
  return field;
}

}  // namespace fracap
