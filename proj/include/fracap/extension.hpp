#pragma once

#include <string>
#include <vector>

#include "fracap/field.hpp"
#include "fracap/nonlocal.hpp"

namespace fracap {

struct ExtensionEnergy {
  double total = 0.0;  // xPart + zPart + robin
  double xPart = 0.0;
  double zPart = 0.0;
  double robinSide = 0.0;
  double robinTop = 0.0;
};

// Discrete weighted energy int z^{1-2s} |grad U|^2 over the truncated box,
// with per-slab closed-form weights and (optionally) the monopole radiation
// terms on the side and top walls.
ExtensionEnergy weightedEnergy(const ExtensionField& U, bool includeRobin = true);

struct ExtensionSolveResult {
  CapacityResult cap;       // value = energy / alpha_{n,s}
  ExtensionField field;     // minimizer on the half-space box
  ExtensionEnergy parts;
  double topBoundaryShare = 0.0;  // robinTop / total
};

// cap_s via the Caffarelli-Silvestre extension: minimize the weighted
// Dirichlet energy with U = 1 on (shape x {z=0}), natural condition on the
// rest of the trace plane, monopole radiation on side and top walls.
ExtensionSolveResult fracCapacityExtension(const Shape& shape, double s, const GridSpec& grid,
                                           double Z, int zLevels,
                                           const SolveOptions& opt = {});

// Same operator but with the whole trace plane fixed to phi (the extension
// problem of a given trace); used to compare against the Poisson convolution.
ExtensionSolveResult extendTrace(const GridFunction& phi, double Z, int zLevels,
                                 const SolveOptions& opt = {});

// Slice-by-slice radial decreasing rearrangement about the origin. Exactly
// preserves every superlevel measure per slice at cell granularity.
ExtensionField partialSchwarz(const ExtensionField& U);

struct LevelStats {
  std::vector<double> tSamples;             // ascending levels in (0,1)
  std::vector<double> zLevels;              // the field's z levels
  std::vector<std::vector<double>> muZ;     // muZ[j][k] = |{U(.,z_j) >= t_k}|
  double T = 1.0;
  double hatT = 0.0;
  double z0 = 0.0;
  bool rigid = false;
  double asymmetry = 0.0;
  double volume = 0.0;   // rasterized |Omega| on the field grid
  double gamma = 0.1;
  double capValue = 0.0;
};

// Superlevel statistics of a capacitary extension field. The field must carry
// cap_s in capValue (set by the solver).
LevelStats levelStats(const ExtensionField& U, const Shape& shape, double gamma);

struct SlabSample {
  double t = 0.0, z = 0.0;
  double measure = 0.0;
  double asym = 0.0;
  double volMargin = 0.0;   // 3 gamma A |Omega| - ||Omega_{t,z}| - |Omega||
  double asymMargin = 0.0;  // A(Omega_{t,z}) - c_gamma A(Omega)
  bool fromConvolution = false;
};

struct SlabReport {
  bool vacuous = false;            // rigid shape, window empty by flag
  bool windowUnresolved = false;   // hatT below ladder resolution
  double cGamma = 0.0;
  std::vector<SlabSample> samples;
  bool allNonnegative() const;
};

// Checks the slab window T + hatT/8 <= t <= T + 3 hatT/8, 0 < z <= z0.
// z levels below the field's first level are sampled through the Poisson
// convolution of the trace (the canonical extension of the discrete trace).
SlabReport slabAsymmetryCheck(const ExtensionField& U, const LevelStats& stats,
                              const Shape& shape);

}  // namespace fracap
