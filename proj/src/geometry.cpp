#include "fracap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fracap/constants.hpp"

namespace fracap {

namespace {

double sq(double x) { return x * x; }

double dist(const Point& a, const Point& b, int n) {
  double d2 = 0.0;
  for (int k = 0; k < n; ++k) d2 += sq(a[k] - b[k]);
  return std::sqrt(d2);
}

// exact distance from a point to an axis box
double pointBoxDistance(const Point& p, const Point& lo, const Point& hi, int n) {
  double d2 = 0.0;
  for (int k = 0; k < n; ++k) {
    double d = std::max({lo[k] - p[k], 0.0, p[k] - hi[k]});
    d2 += d * d;
  }
  return std::sqrt(d2);
}

void flattenLeaves(const Shape& s, std::vector<const Shape*>& out) {
  if (s.kind == Shape::Kind::Union) {
    for (const auto& p : s.parts) flattenLeaves(p, out);
  } else {
    out.push_back(&s);
  }
}

// true if the two primitive leaves are certifiably disjoint
bool leavesDisjoint(const Shape& a, const Shape& b) {
  const int n = a.n;
  if (a.kind == Shape::Kind::Ball && b.kind == Shape::Kind::Ball)
    return dist(a.center, b.center, n) >= a.radius + b.radius;
  if (a.kind == Shape::Kind::Box && b.kind == Shape::Kind::Box) {
    for (int k = 0; k < n; ++k)
      if (a.hi[k] <= b.lo[k] || b.hi[k] <= a.lo[k]) return true;
    return false;
  }
  if (a.kind == Shape::Kind::Ball && b.kind == Shape::Kind::Box)
    return pointBoxDistance(a.center, b.lo, b.hi, n) >= a.radius;
  if (a.kind == Shape::Kind::Box && b.kind == Shape::Kind::Ball)
    return leavesDisjoint(b, a);
  // voxel leaves: certify through bounding boxes only
  Point alo, ahi, blo, bhi;
  a.boundingBox(alo, ahi);
  b.boundingBox(blo, bhi);
  for (int k = 0; k < n; ++k)
    if (ahi[k] <= blo[k] || bhi[k] <= alo[k]) return true;
  return false;
}

constexpr std::size_t kMaxCells = std::size_t(1) << 27;

}  // namespace

double VoxelMask::volume() const { return (double)setCount() * std::pow(h, n); }

std::size_t VoxelMask::setCount() const {
  std::size_t c = 0;
  for (auto v : mask) c += (v != 0);
  return c;
}

Shape Shape::ball(int n, Point c, double r) {
  Shape s;
  s.kind = Kind::Ball;
  s.n = n;
  s.center = c;
  s.radius = r;
  s.validate();
  return s;
}

Shape Shape::box(int n, Point lo, Point hi) {
  Shape s;
  s.kind = Kind::Box;
  s.n = n;
  s.lo = lo;
  s.hi = hi;
  s.validate();
  return s;
}

Shape Shape::unionOf(std::vector<Shape> parts) {
  if (parts.empty()) throw std::domain_error("union of zero shapes");
  Shape s;
  s.kind = Kind::Union;
  s.n = parts.front().n;
  s.parts = std::move(parts);
  s.validate();
  return s;
}

Shape Shape::fromVoxels(VoxelMask m) {
  Shape s;
  s.kind = Kind::Voxels;
  s.n = m.n;
  s.voxels = std::move(m);
  s.validate();
  return s;
}

void Shape::validate() const {
  if (n < 1 || n > 3) throw std::domain_error("dimension must be 1, 2 or 3");
  switch (kind) {
    case Kind::Ball:
      if (!(radius > 0.0)) throw std::domain_error("ball radius must be positive");
      break;
    case Kind::Box:
      for (int k = 0; k < n; ++k)
        if (!(hi[k] > lo[k])) throw std::domain_error("box hi must dominate lo");
      break;
    case Kind::Union:
      for (const auto& p : parts) {
        if (p.n != n) throw std::domain_error("union members must share dimension");
        p.validate();
      }
      break;
    case Kind::Voxels:
      if (voxels.n != n) throw std::domain_error("voxel mask dimension mismatch");
      if (!(voxels.h > 0.0)) throw std::domain_error("voxel spacing must be positive");
      if (voxels.mask.size() != voxels.cellCount())
        throw std::domain_error("voxel mask size mismatch");
      break;
  }
}

bool Shape::contains(const Point& p) const {
  switch (kind) {
    case Kind::Ball:
      return dist(p, center, n) <= radius;
    case Kind::Box:
      for (int k = 0; k < n; ++k)
        if (p[k] < lo[k] || p[k] > hi[k]) return false;
      return true;
    case Kind::Union:
      for (const auto& part : parts)
        if (part.contains(p)) return true;
      return false;
    case Kind::Voxels: {
      std::array<int, 3> idx{0, 0, 0};
      for (int k = 0; k < n; ++k) {
        idx[k] = (int)std::floor((p[k] - voxels.origin[k]) / voxels.h);
      }
      return voxels.at(idx);
    }
  }
  return false;
}

void Shape::boundingBox(Point& outLo, Point& outHi) const {
  outLo = {0, 0, 0};
  outHi = {0, 0, 0};
  switch (kind) {
    case Kind::Ball:
      for (int k = 0; k < n; ++k) {
        outLo[k] = center[k] - radius;
        outHi[k] = center[k] + radius;
      }
      break;
    case Kind::Box:
      outLo = lo;
      outHi = hi;
      break;
    case Kind::Union: {
      parts.front().boundingBox(outLo, outHi);
      for (std::size_t i = 1; i < parts.size(); ++i) {
        Point l, h;
        parts[i].boundingBox(l, h);
        for (int k = 0; k < n; ++k) {
          outLo[k] = std::min(outLo[k], l[k]);
          outHi[k] = std::max(outHi[k], h[k]);
        }
      }
      break;
    }
    case Kind::Voxels:
      for (int k = 0; k < n; ++k) {
        outLo[k] = voxels.origin[k];
        outHi[k] = voxels.origin[k] + voxels.dims[k] * voxels.h;
      }
      break;
  }
}

double Shape::circumRadiusAboutOrigin() const {
  Point lo_, hi_;
  boundingBox(lo_, hi_);
  double r2 = 0.0;
  for (int k = 0; k < n; ++k) r2 += sq(std::max(std::abs(lo_[k]), std::abs(hi_[k])));
  return std::sqrt(r2);
}

Shape Shape::translated(const Point& dx) const {
  Shape s = *this;
  switch (kind) {
    case Kind::Ball:
      for (int k = 0; k < n; ++k) s.center[k] += dx[k];
      break;
    case Kind::Box:
      for (int k = 0; k < n; ++k) {
        s.lo[k] += dx[k];
        s.hi[k] += dx[k];
      }
      break;
    case Kind::Union:
      for (auto& p : s.parts) p = p.translated(dx);
      break;
    case Kind::Voxels:
      for (int k = 0; k < n; ++k) s.voxels.origin[k] += dx[k];
      break;
  }
  return s;
}

Shape Shape::scaled(double lam) const {
  if (!(lam > 0.0)) throw std::domain_error("scale factor must be positive");
  Shape s = *this;
  switch (kind) {
    case Kind::Ball:
      for (int k = 0; k < n; ++k) s.center[k] *= lam;
      s.radius *= lam;
      break;
    case Kind::Box:
      for (int k = 0; k < n; ++k) {
        s.lo[k] *= lam;
        s.hi[k] *= lam;
      }
      break;
    case Kind::Union:
      for (auto& p : s.parts) p = p.scaled(lam);
      break;
    case Kind::Voxels:
      for (int k = 0; k < n; ++k) s.voxels.origin[k] *= lam;
      s.voxels.h *= lam;
      break;
  }
  return s;
}

double volume(const Shape& shape, double resolution) {
  shape.validate();
  switch (shape.kind) {
    case Shape::Kind::Ball:
      return unitBallVolume(shape.n) * std::pow(shape.radius, shape.n);
    case Shape::Kind::Box: {
      double v = 1.0;
      for (int k = 0; k < shape.n; ++k) v *= shape.hi[k] - shape.lo[k];
      return v;
    }
    case Shape::Kind::Union: {
      std::vector<const Shape*> leaves;
      flattenLeaves(shape, leaves);
      bool disjoint = true;
      for (std::size_t i = 0; i < leaves.size() && disjoint; ++i)
        for (std::size_t j = i + 1; j < leaves.size() && disjoint; ++j)
          disjoint = leavesDisjoint(*leaves[i], *leaves[j]);
      bool allAnalytic = true;
      for (auto* l : leaves)
        allAnalytic = allAnalytic && l->kind != Shape::Kind::Voxels;
      if (disjoint && allAnalytic) {
        double v = 0.0;
        for (auto* l : leaves) v += volume(*l, resolution);
        return v;
      }
      if (resolution <= 0.0) throw std::runtime_error("needs rasterization");
      return rasterize(shape, resolution).volume();
    }
    case Shape::Kind::Voxels:
      return shape.voxels.volume();
  }
  throw std::logic_error("unreachable");
}

VoxelMask rasterize(const Shape& shape, double h) {
  Point lo, hi;
  shape.boundingBox(lo, hi);
  // pad by half a cell so boundary centers are sampled
  for (int k = 0; k < shape.n; ++k) {
    lo[k] -= 0.5 * h;
    hi[k] += 0.5 * h;
  }
  return rasterize(shape, h, lo, hi);
}

VoxelMask rasterize(const Shape& shape, double h, const Point& boxLo, const Point& boxHi) {
  if (!(h > 0.0)) throw std::domain_error("resolution must be positive");
  VoxelMask m;
  m.n = shape.n;
  m.h = h;
  m.origin = boxLo;
  std::size_t total = 1;
  for (int k = 0; k < shape.n; ++k) {
    m.dims[k] = std::max(1, (int)std::ceil((boxHi[k] - boxLo[k]) / h - 1e-12));
    total *= (std::size_t)m.dims[k];
  }
  if (total > kMaxCells) throw std::runtime_error("rasterization exceeds memory limit");
  m.mask.assign(total, 0);
  const int nx = m.dims[0], ny = shape.n > 1 ? m.dims[1] : 1,
            nz = shape.n > 2 ? m.dims[2] : 1;
#pragma omp parallel for collapse(2) schedule(static)
  for (int iz = 0; iz < nz; ++iz)
    for (int iy = 0; iy < ny; ++iy) {
      std::array<int, 3> idx{0, iy, iz};
      for (int ix = 0; ix < nx; ++ix) {
        idx[0] = ix;
        Point p = m.cellCenter(idx);
        if (shape.contains(p)) m.mask[m.flatIndex(idx)] = 1;
      }
    }
  return m;
}

double ballIntersectionVolume(int n, double d, double r1, double r2) {
  d = std::abs(d);
  if (d >= r1 + r2) return 0.0;
  const double rmin = std::min(r1, r2), rmax = std::max(r1, r2);
  if (d <= rmax - rmin) return unitBallVolume(n) * std::pow(rmin, n);
  switch (n) {
    case 1:
      return (rmin + rmax) - d;  // overlap of two intervals
    case 2: {
      auto clampAcos = [](double x) { return std::acos(std::clamp(x, -1.0, 1.0)); };
      const double a1 = clampAcos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1));
      const double a2 = clampAcos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2));
      const double tri = 0.5 * std::sqrt(std::max(0.0, (-d + r1 + r2) * (d + r1 - r2) *
                                                            (d - r1 + r2) * (d + r1 + r2)));
      return r1 * r1 * a1 + r2 * r2 * a2 - tri;
    }
    case 3: {
      const double a = r1 + r2 - d;
      return M_PI * a * a * (d * d + 2 * d * (r1 + r2) - 3 * sq(r1 - r2)) / (12 * d);
    }
    default:
      throw std::domain_error("ballIntersectionVolume: n must be 1, 2 or 3");
  }
}

double symmetricDifference(const Shape& a, const Shape& b, double resolution) {
  if (a.n != b.n) throw std::domain_error("symmetricDifference: dimension mismatch");
  if (a.kind == Shape::Kind::Ball && b.kind == Shape::Kind::Ball) {
    const double d = dist(a.center, b.center, a.n);
    const double va = unitBallVolume(a.n) * std::pow(a.radius, a.n);
    const double vb = unitBallVolume(a.n) * std::pow(b.radius, a.n);
    return va + vb - 2.0 * ballIntersectionVolume(a.n, d, a.radius, b.radius);
  }
  if (!(resolution > 0.0)) throw std::domain_error("resolution must be positive");
  Point alo, ahi, blo, bhi;
  a.boundingBox(alo, ahi);
  b.boundingBox(blo, bhi);
  Point lo{0, 0, 0}, hi{0, 0, 0};
  for (int k = 0; k < a.n; ++k) {
    lo[k] = std::min(alo[k], blo[k]) - 0.5 * resolution;
    hi[k] = std::max(ahi[k], bhi[k]) + 0.5 * resolution;
  }
  VoxelMask ma = rasterize(a, resolution, lo, hi);
  VoxelMask mb = rasterize(b, resolution, lo, hi);
  std::size_t diff = 0;
  for (std::size_t i = 0; i < ma.mask.size(); ++i) diff += (ma.mask[i] != mb.mask[i]);
  return (double)diff * std::pow(resolution, a.n);
}

namespace {

struct MaskObjective {
  const VoxelMask& m;
  double rstar;
  std::array<int, 3> setLo{0, 0, 0}, setHi{0, 0, 0};  // index bbox of set cells
  std::size_t nSet = 0;

  explicit MaskObjective(const VoxelMask& mask, double r) : m(mask), rstar(r) {
    for (int k = 0; k < 3; ++k) {
      setLo[k] = std::numeric_limits<int>::max();
      setHi[k] = std::numeric_limits<int>::min();
    }
    const int nx = m.dims[0], ny = m.n > 1 ? m.dims[1] : 1, nz = m.n > 2 ? m.dims[2] : 1;
    std::array<int, 3> idx{0, 0, 0};
    for (int iz = 0; iz < nz; ++iz)
      for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
          idx = {ix, iy, iz};
          if (!m.mask[m.flatIndex(idx)]) continue;
          ++nSet;
          for (int k = 0; k < m.n; ++k) {
            setLo[k] = std::min(setLo[k], idx[k]);
            setHi[k] = std::max(setHi[k], idx[k]);
          }
        }
    for (int k = m.n; k < 3; ++k) setLo[k] = setHi[k] = 0;
  }

  // symmetric-difference cell count between the set and the rasterized ball
  std::size_t symmDiffCells(const Point& c) const {
    const double h = m.h;
    std::array<int, 3> blo{0, 0, 0}, bhi{0, 0, 0};
    for (int k = 0; k < m.n; ++k) {
      blo[k] = (int)std::floor((c[k] - rstar - m.origin[k]) / h - 0.5);
      bhi[k] = (int)std::ceil((c[k] + rstar - m.origin[k]) / h + 0.5);
    }
    std::size_t nBall = 0, inter = 0;
    const double r2 = rstar * rstar;
    std::array<int, 3> idx{0, 0, 0};
    const int z0 = m.n > 2 ? blo[2] : 0, z1 = m.n > 2 ? bhi[2] : 0;
    const int y0 = m.n > 1 ? blo[1] : 0, y1 = m.n > 1 ? bhi[1] : 0;
    for (int iz = z0; iz <= z1; ++iz)
      for (int iy = y0; iy <= y1; ++iy)
        for (int ix = blo[0]; ix <= bhi[0]; ++ix) {
          idx = {ix, iy, iz};
          double d2 = 0.0;
          for (int k = 0; k < m.n; ++k) {
            const double ck = m.origin[k] + (idx[k] + 0.5) * h - c[k];
            d2 += ck * ck;
          }
          if (d2 > r2) continue;
          ++nBall;
          if (m.at(idx)) ++inter;
        }
    return nSet + nBall - 2 * inter;
  }
};

}  // namespace

AsymmetryResult fraenkelAsymmetryOfMask(const VoxelMask& m) {
  const double h = m.h;
  const double wn = unitBallVolume(m.n);
  const double vol = m.volume();
  if (m.setCount() == 0) throw std::domain_error("fraenkelAsymmetry: empty shape");
  const double rstar = std::pow(vol / wn, 1.0 / m.n);
  if (rstar < h) throw std::runtime_error("fraenkelAsymmetry: resolution too coarse");

  MaskObjective obj(m, rstar);

  // stage 1: exhaustive lattice-aligned grid at spacing 2h, set bbox inflated
  // by one optimal-ball diameter
  const int inflate = (int)std::ceil(2.0 * rstar / h);
  Point best{0, 0, 0};
  std::size_t bestCells = std::numeric_limits<std::size_t>::max();
  std::array<int, 3> s0{0, 0, 0}, s1{0, 0, 0};
  for (int k = 0; k < m.n; ++k) {
    s0[k] = obj.setLo[k] - inflate;
    s1[k] = obj.setHi[k] + inflate;
  }
  const int z0 = m.n > 2 ? s0[2] : 0, z1 = m.n > 2 ? s1[2] : 0;
  const int y0 = m.n > 1 ? s0[1] : 0, y1 = m.n > 1 ? s1[1] : 0;
  for (int iz = z0; iz <= z1; iz += 2)
    for (int iy = y0; iy <= y1; iy += 2)
      for (int ix = s0[0]; ix <= s1[0]; ix += 2) {
        std::array<int, 3> idx{ix, iy, iz};
        Point c{0, 0, 0};
        for (int k = 0; k < m.n; ++k) c[k] = m.origin[k] + (idx[k] + 0.5) * h;
        // centers whose ball cannot touch the set are never optimal
        bool mayTouch = true;
        for (int k = 0; k < m.n; ++k) {
          const double lo = m.origin[k] + obj.setLo[k] * h;
          const double hi = m.origin[k] + (obj.setHi[k] + 1) * h;
          if (c[k] < lo - rstar - h || c[k] > hi + rstar + h) mayTouch = false;
        }
        if (!mayTouch) continue;
        const std::size_t cells = obj.symmDiffCells(c);
        const bool better =
            cells < bestCells ||
            (cells == bestCells && std::lexicographical_compare(c.begin(), c.end(),
                                                                best.begin(), best.end()));
        if (better) {
          bestCells = cells;
          best = c;
        }
      }

  // stage 2: coordinate descent at spacing h/4
  const double step = 0.25 * h;
  const std::size_t tolCells = std::max<std::size_t>(1, (std::size_t)(1e-6 * obj.nSet));
  for (int sweep = 0; sweep < 400; ++sweep) {
    std::size_t before = bestCells;
    for (int k = 0; k < m.n; ++k) {
      for (double sgn : {-1.0, 1.0}) {
        for (;;) {
          Point c = best;
          c[k] += sgn * step;
          const std::size_t cells = obj.symmDiffCells(c);
          if (cells < bestCells) {
            bestCells = cells;
            best = c;
          } else {
            break;
          }
        }
      }
    }
    if (before - bestCells < tolCells) break;
  }

  AsymmetryResult r;
  r.value = (double)bestCells * std::pow(h, m.n) / vol;
  r.optimalCenter = best;
  r.optimalRadius = rstar;
  return r;
}

AsymmetryResult fraenkelAsymmetry(const Shape& shape, double resolution) {
  shape.validate();
  if (shape.kind == Shape::Kind::Ball) {
    // rigidity: a ball is its own optimal ball
    return {0.0, shape.center, shape.radius};
  }
  VoxelMask m = shape.kind == Shape::Kind::Voxels ? shape.voxels
                                                  : rasterize(shape, resolution);
  return fraenkelAsymmetryOfMask(m);
}

double voxelPerimeter(const VoxelMask& m) {
  if (m.setCount() == 0) throw std::domain_error("voxelPerimeter: empty mask");
  const int nx = m.dims[0], ny = m.n > 1 ? m.dims[1] : 1, nz = m.n > 2 ? m.dims[2] : 1;
  std::size_t faces = 0;
  for (int iz = 0; iz < nz; ++iz)
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        std::array<int, 3> idx{ix, iy, iz};
        if (!m.mask[m.flatIndex(idx)]) continue;
        for (int k = 0; k < m.n; ++k)
          for (int sgn : {-1, 1}) {
            auto nb = idx;
            nb[k] += sgn;
            if (!m.at(nb)) ++faces;
          }
      }
  return (double)faces * std::pow(m.h, m.n - 1);
}

}  // namespace fracap
