#include "fracap/extension.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fracap/constants.hpp"
#include "fracap/det.hpp"
#include "fracap/pcg.hpp"

namespace fracap {

namespace {

// closed-form moments of the weight z^{1-2s}
double mom0(double a, double b, double s) {
  const double e = 2.0 - 2.0 * s;
  return (std::pow(b, e) - std::pow(a, e)) / e;
}
double mom1(double a, double b, double s) {
  const double e = 3.0 - 2.0 * s;
  return (std::pow(b, e) - std::pow(a, e)) / e;
}

struct SlabWeights {
  std::vector<double> kappa;  // z-edge weight: int slab z^{1-2s} / dz^2
  std::vector<double> ell;    // lumped hat weight per level
};

SlabWeights slabWeights(const ZGrid& zg, double s) {
  const int M = zg.M;
  SlabWeights w;
  w.kappa.resize(M);
  w.ell.assign(M + 1, 0.0);
  for (int j = 0; j < M; ++j) {
    const double a = zg.levels[j], b = zg.levels[j + 1];
    const double dz = b - a;
    const double i0 = mom0(a, b, s);
    const double i1 = mom1(a, b, s);
    w.kappa[j] = i0 / (dz * dz);
    // hat lumping: rising part to level j+1, falling part to level j
    w.ell[j + 1] += (i1 - a * i0) / dz;
    w.ell[j] += (b * i0 - i1) / dz;
  }
  return w;
}

struct Stencil {
  const GridSpec* g;
  const ZGrid* zg;
  double s;
  int L;  // levels
  SlabWeights w;
  double hxw;   // h^{n-2}
  double hzw;   // h^n
  std::vector<double> robin;  // per-DOF radiation coefficient
  std::vector<std::uint8_t> fixedMask;
  std::vector<double> fixedValue;
  std::vector<double> diag;

  std::size_t dof(std::size_t cell, int j) const { return cell * L + j; }
};

Stencil buildStencil(const GridSpec& g, const ZGrid& zg, double s, bool robinWalls) {
  Stencil st;
  st.g = &g;
  st.zg = &zg;
  st.s = s;
  st.L = (int)zg.levels.size();
  st.w = slabWeights(zg, s);
  const int n = g.n;
  const double h = g.h();
  st.hxw = std::pow(h, n - 2);
  st.hzw = std::pow(h, n);
  const std::size_t N = g.cells();
  st.robin.assign(N * st.L, 0.0);
  st.fixedMask.assign(N * st.L, 0);
  st.fixedValue.assign(N * st.L, 0.0);

  const double beta = n - 2.0 * s;
  const double Z = zg.Z;
  if (robinWalls) {
    for (std::size_t c = 0; c < N; ++c) {
      const auto idx = g.unflatten(c);
      const Point p = g.center(idx);
      int wallFaces = 0;
      for (int k = 0; k < n; ++k)
        if (idx[k] == 0 || idx[k] == g.m - 1) ++wallFaces;
      for (int j = 0; j < st.L; ++j) {
        double coef = 0.0;
        if (wallFaces > 0) {
          const double z = zg.levels[j];
          double x2 = 0.0;
          for (int k = 0; k < n; ++k) x2 += p[k] * p[k];
          const double rho2 = x2 + z * z;
          coef += wallFaces * st.w.ell[j] * std::pow(h, n - 1) * beta * g.R / rho2;
        }
        if (j == st.L - 1) {
          double x2 = 0.0;
          for (int k = 0; k < n; ++k) x2 += p[k] * p[k];
          const double rho2 = x2 + Z * Z;
          coef += std::pow(Z, 1.0 - 2.0 * s) * st.hzw * beta * Z / rho2;
        }
        st.robin[st.dof(c, j)] = coef;
      }
    }
  }

  // diagonal of the system matrix
  st.diag.assign(N * st.L, 0.0);
  for (std::size_t c = 0; c < N; ++c) {
    const auto idx = g.unflatten(c);
    int deg = 0;
    for (int k = 0; k < n; ++k) {
      if (idx[k] > 0) ++deg;
      if (idx[k] < g.m - 1) ++deg;
    }
    for (int j = 0; j < st.L; ++j) {
      double d = st.w.ell[j] * st.hxw * deg + st.robin[st.dof(c, j)];
      if (j > 0) d += st.w.kappa[j - 1] * st.hzw;
      if (j < st.L - 1) d += st.w.kappa[j] * st.hzw;
      st.diag[st.dof(c, j)] = d;
    }
  }
  return st;
}

// y = M x ; fixed DOFs pass through as identity (handled by caller masks)
void applyStencil(const Stencil& st, const std::vector<double>& x, std::vector<double>& y) {
  const GridSpec& g = *st.g;
  const int n = g.n;
  const int L = st.L;
  const std::size_t N = g.cells();
  y.assign(N * L, 0.0);
  std::array<std::size_t, 3> stride{1, 0, 0};
  if (n > 1) stride[1] = (std::size_t)g.m;
  if (n > 2) stride[2] = (std::size_t)g.m * g.m;

#pragma omp parallel for schedule(static)
  for (long long cc = 0; cc < (long long)N; ++cc) {
    const std::size_t c = (std::size_t)cc;
    const auto idx = g.unflatten(c);
    double* yc = y.data() + c * L;
    const double* xc = x.data() + c * L;
    // z edges
    for (int j = 0; j < L - 1; ++j) {
      const double w = st.w.kappa[j] * st.hzw;
      const double d = xc[j] - xc[j + 1];
      yc[j] += w * d;
      yc[j + 1] -= w * d;
    }
    // x edges and radiation
    for (int j = 0; j < L; ++j) {
      double acc = st.robin[c * L + j] * xc[j];
      const double lw = st.w.ell[j] * st.hxw;
      for (int k = 0; k < n; ++k) {
        if (idx[k] > 0) acc += lw * (xc[j] - x[(c - stride[k]) * L + j]);
        if (idx[k] < g.m - 1) acc += lw * (xc[j] - x[(c + stride[k]) * L + j]);
      }
      yc[j] += acc;
    }
  }
}

double stencilEnergyParts(const Stencil& st, const std::vector<double>& x,
                          ExtensionEnergy& parts) {
  const GridSpec& g = *st.g;
  const int n = g.n;
  const int L = st.L;
  const std::size_t N = g.cells();
  std::array<std::size_t, 3> stride{1, 0, 0};
  if (n > 1) stride[1] = (std::size_t)g.m;
  if (n > 2) stride[2] = (std::size_t)g.m * g.m;

  parts.zPart = deterministicSum(N, [&](std::size_t c) {
    const double* xc = x.data() + c * L;
    double acc = 0.0;
    for (int j = 0; j < L - 1; ++j) {
      const double d = xc[j] - xc[j + 1];
      acc += st.w.kappa[j] * st.hzw * d * d;
    }
    return acc;
  });
  parts.xPart = deterministicSum(N, [&](std::size_t c) {
    const auto idx = g.unflatten(c);
    const double* xc = x.data() + c * L;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      if (idx[k] >= g.m - 1) continue;  // count each edge once, from the low side
      const double* xn = x.data() + (c + stride[k]) * L;
      for (int j = 0; j < L; ++j) {
        const double d = xc[j] - xn[j];
        acc += st.w.ell[j] * st.hxw * d * d;
      }
    }
    return acc;
  });
  parts.robinSide = 0.0;
  parts.robinTop = 0.0;
  double side = deterministicSum(N, [&](std::size_t c) {
    double acc = 0.0;
    for (int j = 0; j < L - 1; ++j)
      acc += st.robin[c * L + j] * x[c * L + j] * x[c * L + j];
    return acc;
  });
  double top = deterministicSum(N, [&](std::size_t c) {
    const int j = L - 1;
    return st.robin[c * L + j] * x[c * L + j] * x[c * L + j];
  });
  // the last level carries both side and top coefficients merged; split is
  // informational only
  parts.robinSide = side;
  parts.robinTop = top;
  parts.total = parts.xPart + parts.zPart + parts.robinSide + parts.robinTop;
  return parts.total;
}

// block-tridiagonal (z-line) preconditioner: per x-cell Thomas solve
struct ZLinePrec {
  const Stencil* st;
  std::vector<double> lower, diagW, upper;  // shared tridiagonal bands (kappa terms)

  explicit ZLinePrec(const Stencil& s) : st(&s) {
    const int L = st->L;
    lower.assign(L, 0.0);
    upper.assign(L, 0.0);
    for (int j = 0; j < L - 1; ++j) {
      const double w = st->w.kappa[j] * st->hzw;
      upper[j] = -w;
      lower[j + 1] = -w;
    }
  }

  void operator()(const std::vector<double>& r, std::vector<double>& z) const {
    const GridSpec& g = *st->g;
    const int L = st->L;
    const std::size_t N = g.cells();
    z.assign(N * L, 0.0);
#pragma omp parallel
    {
      std::vector<double> c(L), d(L);
#pragma omp for schedule(static)
      for (long long cc = 0; cc < (long long)N; ++cc) {
        const std::size_t cell = (std::size_t)cc;
        const double* rc = r.data() + cell * L;
        double* zc = z.data() + cell * L;
        // Thomas on [lower, st->diag(cell), upper]; fixed DOFs act as identity
        for (int j = 0; j < L; ++j) {
          const bool fx = st->fixedMask[cell * L + j];
          const double dj = fx ? 1.0 : st->diag[cell * L + j];
          const double lj = (fx || j == 0 || st->fixedMask[cell * L + j - 1]) ? 0.0 : lower[j];
          const double uj = (fx || j == L - 1 || st->fixedMask[cell * L + j + 1]) ? 0.0 : upper[j];
          if (j == 0) {
            c[j] = uj / dj;
            d[j] = rc[j] / dj;
          } else {
            const double m = dj - lj * c[j - 1];
            c[j] = uj / m;
            d[j] = (rc[j] - lj * d[j - 1]) / m;
          }
        }
        zc[L - 1] = d[L - 1];
        for (int j = L - 2; j >= 0; --j) zc[j] = d[j] - c[j] * zc[j + 1];
      }
    }
  }
};

ExtensionSolveResult solveExtensionSystem(Stencil& st, double s, const GridSpec& grid,
                                          const ZGrid& zg, const SolveOptions& opt,
                                          const char* who) {
  const std::size_t N = grid.cells();
  const int L = st.L;
  const std::size_t ND = N * L;

  std::vector<double> xFixed(ND, 0.0);
  for (std::size_t i = 0; i < ND; ++i)
    if (st.fixedMask[i]) xFixed[i] = st.fixedValue[i];

  std::vector<double> mx;
  applyStencil(st, xFixed, mx);
  std::vector<double> b(ND, 0.0);
  for (std::size_t i = 0; i < ND; ++i) b[i] = st.fixedMask[i] ? 0.0 : -mx[i];

  auto applyA = [&](const std::vector<double>& x, std::vector<double>& y) {
    std::vector<double> xm(x);
    for (std::size_t i = 0; i < ND; ++i)
      if (st.fixedMask[i]) xm[i] = 0.0;
    applyStencil(st, xm, y);
    for (std::size_t i = 0; i < ND; ++i)
      if (st.fixedMask[i]) y[i] = 0.0;
  };
  ZLinePrec lineprec(st);
  auto prec = [&](const std::vector<double>& r, std::vector<double>& z) {
    lineprec(r, z);
    for (std::size_t i = 0; i < ND; ++i)
      if (st.fixedMask[i]) z[i] = 0.0;
  };

  std::size_t freeCount = ND;
  for (auto f : st.fixedMask) freeCount -= (f != 0);
  const int maxIter = std::max(300, (int)(opt.maxIterScale * std::sqrt((double)freeCount)));

  std::vector<double> x(ND, 0.0);
  PcgOutcome cg = pcg(ND, applyA, prec, b, x, opt.tol, maxIter);
  if (!cg.converged) {
    std::ostringstream msg;
    msg << who << ": CG did not converge, residual=" << cg.relResidual;
    throw std::runtime_error(msg.str());
  }
  for (std::size_t i = 0; i < ND; ++i) x[i] += xFixed[i];

  double violation = 0.0;
  for (double v : x) violation = std::max(violation, std::max(v - 1.0, -v));

  ExtensionSolveResult res;
  res.field = ExtensionField(grid, s, zg);
  res.field.values = x;

  ExtensionEnergy rawParts;
  const double rawE = stencilEnergyParts(st, x, rawParts);
  std::vector<double> xc(x);
  for (auto& v : xc) v = std::clamp(v, 0.0, 1.0);
  ExtensionEnergy clipParts;
  const double clipE = stencilEnergyParts(st, xc, clipParts);
  if (clipE > rawE * (1.0 + 1e-9) + 1e-12)
    throw std::logic_error("clipping increased the extension energy");
  res.field.values = std::move(xc);
  res.parts = clipParts;

  const double alpha = extensionConstant(grid.n, s);
  res.cap.value = clipE / alpha;
  res.cap.energy = clipE;
  res.cap.residual = cg.relResidual;
  res.cap.h = grid.h();
  res.cap.R = grid.R;
  res.cap.iterations = cg.iterations;
  res.cap.method = "extension";
  res.cap.maxPrincipleViolation = std::max(violation, 0.0);
  res.cap.potential = res.field.trace();
  res.field.capValue = res.cap.value;
  res.topBoundaryShare = clipParts.robinTop / std::max(clipE, 1e-300);
  return res;
}

}  // namespace

ExtensionEnergy weightedEnergy(const ExtensionField& U, bool includeRobin) {
  Stencil st = buildStencil(U.grid, U.z, U.s, includeRobin);
  ExtensionEnergy parts;
  stencilEnergyParts(st, U.values, parts);
  return parts;
}

ExtensionSolveResult fracCapacityExtension(const Shape& shape, double s, const GridSpec& grid,
                                           double Z, int zLevels, const SolveOptions& opt) {
  shape.validate();
  if (shape.n != grid.n) throw std::domain_error("shape/grid dimension mismatch");
  if (!(grid.n > 2.0 * s)) throw std::domain_error("fracCapacityExtension: requires n > 2s");
  if (shape.circumRadiusAboutOrigin() > 0.9 * grid.R)
    throw std::runtime_error("truncation too small: shape not strictly inside the box");
  if (zLevels < 4) throw std::runtime_error("z-grid too coarse");
  if (!(Z > 0.0)) Z = grid.R;

  ZGrid zg = ZGrid::graded(Z, zLevels, s);
  Stencil st = buildStencil(grid, zg, s, /*robinWalls=*/true);

  std::vector<std::uint8_t> inShape = rasterizeOnGrid(shape, grid);
  std::size_t constrained = 0;
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    if (inShape[c]) {
      st.fixedMask[st.dof(c, 0)] = 1;
      st.fixedValue[st.dof(c, 0)] = 1.0;
      ++constrained;
    }
  }
  if (constrained == 0)
    throw std::domain_error("degenerate shape: no cells at this resolution");

  ExtensionSolveResult res = solveExtensionSystem(st, s, grid, zg, opt, "fracCapacityExtension");
  if (res.topBoundaryShare > 0.05)
    throw std::runtime_error("half-space height too small: top boundary share exceeds 5%");
  return res;
}

ExtensionSolveResult extendTrace(const GridFunction& phi, double Z, int zLevels,
                                 const SolveOptions& opt) {
  const GridSpec& grid = phi.grid;
  if (zLevels < 4) throw std::runtime_error("z-grid too coarse");
  if (!(Z > 0.0)) Z = grid.R;
  ZGrid zg = ZGrid::graded(Z, zLevels, phi.s);
  Stencil st = buildStencil(grid, zg, phi.s, /*robinWalls=*/true);
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    st.fixedMask[st.dof(c, 0)] = 1;
    st.fixedValue[st.dof(c, 0)] = phi.values[c];
  }
  return solveExtensionSystem(st, phi.s, grid, zg, opt, "extendTrace");
}

ExtensionField partialSchwarz(const ExtensionField& U) {
  for (double v : U.values)
    if (v < 0.0) throw std::domain_error("partialSchwarz: negative values");
  const GridSpec& g = U.grid;
  const std::size_t N = g.cells();
  const int L = U.levelCount();

  // cell order: distance to origin, ties by flat index
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> r2(N);
  for (std::size_t c = 0; c < N; ++c) {
    const double r = g.centerRadius(c);
    r2[c] = r * r;
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (r2[a] != r2[b]) return r2[a] < r2[b];
    return a < b;
  });

  ExtensionField out(g, U.s, U.z);
  out.capValue = U.capValue;
  std::vector<double> slice(N);
  for (int j = 0; j < L; ++j) {
    for (std::size_t c = 0; c < N; ++c) slice[c] = U.at(c, j);
    std::sort(slice.begin(), slice.end(), std::greater<double>());
    for (std::size_t k = 0; k < N; ++k) out.at(order[k], j) = slice[k];
  }
  return out;
}

namespace {

std::vector<double> sortedSlice(const ExtensionField& U, int j) {
  const std::size_t N = U.grid.cells();
  std::vector<double> v(N);
  for (std::size_t c = 0; c < N; ++c) v[c] = U.at(c, j);
  std::sort(v.begin(), v.end());
  return v;
}

double measureAtLeast(const std::vector<double>& sortedVals, double t, double cellVol) {
  auto it = std::lower_bound(sortedVals.begin(), sortedVals.end(), t);
  return (double)(sortedVals.end() - it) * cellVol;
}

}  // namespace

LevelStats levelStats(const ExtensionField& U, const Shape& shape, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0 / 9.0))
    throw std::domain_error("levelStats: gamma must lie in (0,1/9)");
  const GridSpec& g = U.grid;
  const double cellVol = std::pow(g.h(), g.n);

  LevelStats st;
  st.gamma = gamma;
  st.capValue = U.capValue;
  if (!(st.capValue > 0.0))
    throw std::invalid_argument("levelStats: field does not carry a capacity value");

  auto mask = rasterizeOnGrid(shape, g);
  std::size_t cnt = 0;
  for (auto m : mask) cnt += m;
  st.volume = (double)cnt * cellVol;
  if (cnt == 0) throw std::domain_error("levelStats: empty shape on this grid");

  st.asymmetry = fraenkelAsymmetry(shape, g.h()).value;

  // 512 uniform levels; the window points are inserted after T is known
  const int NT = 512;
  std::vector<double> ladder;
  for (int k = 1; k < NT; ++k) ladder.push_back((double)k / NT);

  auto trace = sortedSlice(U, 0);
  if (st.asymmetry <= 0.0) {
    st.rigid = true;
    st.T = 1.0;
    st.hatT = 0.0;
    st.z0 = 0.0;
  } else {
    const double target = st.volume * (1.0 + gamma * st.asymmetry);
    st.T = 1.0;
    for (double t : ladder) {
      if (measureAtLeast(trace, t, cellVol) <= target) {
        st.T = t;
        break;
      }
    }
    st.hatT = 1.0 - st.T;
    const double cns = poissonNormalization(g.n, U.s);
    const double inner = gamma * st.asymmetry * st.volume / (cns * st.capValue);
    st.z0 = std::pow(st.hatT / 16.0 * std::sqrt(inner), 1.0 / U.s);
    ladder.push_back(st.T + st.hatT / 8.0);
    ladder.push_back(st.T + 3.0 * st.hatT / 8.0);
    std::sort(ladder.begin(), ladder.end());
    ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());
  }
  st.tSamples = ladder;
  st.zLevels = U.z.levels;
  st.muZ.resize(st.zLevels.size());
  for (std::size_t j = 0; j < st.zLevels.size(); ++j) {
    auto vals = sortedSlice(U, (int)j);
    st.muZ[j].resize(ladder.size());
    for (std::size_t k = 0; k < ladder.size(); ++k)
      st.muZ[j][k] = measureAtLeast(vals, ladder[k], cellVol);
  }
  return st;
}

bool SlabReport::allNonnegative() const {
  for (const auto& s : samples)
    if (s.volMargin < 0.0 || s.asymMargin < 0.0) return false;
  return true;
}

SlabReport slabAsymmetryCheck(const ExtensionField& U, const LevelStats& stats,
                              const Shape& shape) {
  SlabReport rep;
  rep.cGamma = asymmetryTransferConstant(3.0 * stats.gamma);
  if (stats.rigid) {
    rep.vacuous = true;
    return rep;
  }
  if (stats.hatT <= 1e-12) {
    rep.windowUnresolved = true;
    return rep;
  }
  const GridSpec& g = U.grid;
  const double cellVol = std::pow(g.h(), g.n);
  const double tLo = stats.T + stats.hatT / 8.0;
  const double tMid = stats.T + stats.hatT / 4.0;
  const double tHi = stats.T + 3.0 * stats.hatT / 8.0;
  const std::vector<double> ts{tLo, tMid, tHi};

  // z samples: field levels inside (0, z0]; convolution slices otherwise
  std::vector<std::pair<double, std::vector<double>>> slices;  // (z, values)
  for (int j = 1; j < U.levelCount(); ++j) {
    const double z = U.z.levels[j];
    if (z > 0.0 && z <= stats.z0) {
      std::vector<double> v(g.cells());
      for (std::size_t c = 0; c < g.cells(); ++c) v[c] = U.at(c, j);
      slices.emplace_back(z, std::move(v));
    }
  }
  bool fromConv = false;
  if (slices.empty() && stats.z0 > 0.0) {
    fromConv = true;
    std::vector<double> zs{0.25 * stats.z0, 0.5 * stats.z0, 0.75 * stats.z0, stats.z0};
    ExtensionField conv = poissonExtend(U.trace(), zs);
    for (int j = 1; j < conv.levelCount(); ++j) {
      std::vector<double> v(g.cells());
      for (std::size_t c = 0; c < g.cells(); ++c) v[c] = conv.at(c, j);
      slices.emplace_back(conv.z.levels[j], std::move(v));
    }
  }
  if (slices.empty()) {
    rep.windowUnresolved = true;
    return rep;
  }

  for (const auto& [z, vals] : slices) {
    for (double t : ts) {
      VoxelMask m = maskOnGrid(g, std::vector<std::uint8_t>(g.cells(), 0));
      std::size_t cnt = 0;
      for (std::size_t c = 0; c < g.cells(); ++c) {
        if (vals[c] >= t) {
          m.mask[c] = 1;
          ++cnt;
        }
      }
      SlabSample sample;
      sample.t = t;
      sample.z = z;
      sample.fromConvolution = fromConv;
      sample.measure = (double)cnt * cellVol;
      sample.asym = cnt > 0 ? fraenkelAsymmetryOfMask(m).value : 2.0;
      sample.volMargin = 3.0 * stats.gamma * stats.asymmetry * stats.volume -
                         std::abs(sample.measure - stats.volume);
      sample.asymMargin = sample.asym - rep.cGamma * stats.asymmetry;
      rep.samples.push_back(sample);
    }
  }
  return rep;
}

}  // namespace fracap
