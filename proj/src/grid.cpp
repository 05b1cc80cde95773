#include "fracap/grid.hpp"

#include <cmath>

namespace fracap {

std::vector<std::uint8_t> rasterizeOnGrid(const Shape& shape, const GridSpec& grid) {
  std::vector<std::uint8_t> mask(grid.cells(), 0);
  const int nx = grid.m, ny = grid.n > 1 ? grid.m : 1, nz = grid.n > 2 ? grid.m : 1;
#pragma omp parallel for collapse(2) schedule(static)
  for (int iz = 0; iz < nz; ++iz)
    for (int iy = 0; iy < ny; ++iy) {
      std::array<int, 3> idx{0, iy, iz};
      for (int ix = 0; ix < nx; ++ix) {
        idx[0] = ix;
        if (shape.contains(grid.center(idx))) mask[grid.flatten(idx)] = 1;
      }
    }
  return mask;
}

VoxelMask maskOnGrid(const GridSpec& grid, const std::vector<std::uint8_t>& mask) {
  VoxelMask m;
  m.n = grid.n;
  m.h = grid.h();
  m.origin = {0, 0, 0};
  for (int k = 0; k < grid.n; ++k) m.origin[k] = -grid.R;
  m.dims = {1, 1, 1};
  for (int k = 0; k < grid.n; ++k) m.dims[k] = grid.m;
  m.mask = mask;
  return m;
}

}  // namespace fracap
