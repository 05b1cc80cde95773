#pragma once

#include <vector>

#include "fracap/grid.hpp"

namespace fracap {

// z-levels for the truncated half-space; levels[0] == 0 always.
struct ZGrid {
  double Z = 0.0;
  int M = 0;
  std::vector<double> levels;

  // z_j = Z (j/M)^{1/(1-s)}: the weight z^{1-2s} integrates in closed form
  // over every slab and the grading refines toward the trace plane.
  static ZGrid graded(double Z, int M, double s);
  static ZGrid fromLevels(std::vector<double> zs);
};

// Scalar field on grid x zgrid; layout is z-contiguous per x-cell:
// values[cell * (M+1) + j].
struct ExtensionField {
  GridSpec grid;
  double s = 0.5;
  ZGrid z;
  std::vector<double> values;
  double capValue = 0.0;  // cap_s of the generating shape when applicable

  ExtensionField() = default;
  ExtensionField(GridSpec g, double order, ZGrid zg)
      : grid(g), s(order), z(std::move(zg)),
        values(g.cells() * (std::size_t)(z.levels.size()), 0.0) {}

  int levelCount() const { return (int)z.levels.size(); }
  double& at(std::size_t cell, int j) { return values[cell * levelCount() + j]; }
  double at(std::size_t cell, int j) const { return values[cell * levelCount() + j]; }

  GridFunction slice(int j) const;
  GridFunction trace() const { return slice(0); }
};

}  // namespace fracap
