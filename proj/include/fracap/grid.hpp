#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fracap/geometry.hpp"

namespace fracap {

// Uniform cell-centered grid on the box [-R,R]^n, m cells per axis.
struct GridSpec {
  int n = 2;
  int m = 64;
  double R = 3.0;

  double h() const { return 2.0 * R / m; }
  std::size_t cells() const {
    std::size_t c = 1;
    for (int k = 0; k < n; ++k) c *= (std::size_t)m;
    return c;
  }
  std::array<int, 3> unflatten(std::size_t f) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int k = 0; k < n; ++k) {
      idx[k] = (int)(f % m);
      f /= m;
    }
    return idx;
  }
  std::size_t flatten(const std::array<int, 3>& idx) const {
    std::size_t f = 0;
    for (int k = n - 1; k >= 0; --k) f = f * m + idx[k];
    return f;
  }
  Point center(const std::array<int, 3>& idx) const {
    Point p{0, 0, 0};
    for (int k = 0; k < n; ++k) p[k] = -R + (idx[k] + 0.5) * h();
    return p;
  }
  double centerRadius(std::size_t f) const {
    auto idx = unflatten(f);
    Point p = center(idx);
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) r2 += p[k] * p[k];
    return std::sqrt(r2);
  }
  bool operator==(const GridSpec& o) const { return n == o.n && m == o.m && R == o.R; }
};

struct GridFunction {
  GridSpec grid;
  double s = 0.5;
  std::vector<double> values;

  GridFunction() = default;
  GridFunction(GridSpec g, double order) : grid(g), s(order), values(g.cells(), 0.0) {}
};

// Cell-center membership mask of a shape on the grid.
std::vector<std::uint8_t> rasterizeOnGrid(const Shape& shape, const GridSpec& grid);

// Wraps a grid mask as a voxel shape (origin at -R).
VoxelMask maskOnGrid(const GridSpec& grid, const std::vector<std::uint8_t>& mask);

}  // namespace fracap
