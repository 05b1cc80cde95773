#pragma once

#include <vector>

#include "fracap/nonlocal.hpp"

namespace fracap {

// Newtonian capacity, n = 3: 7-point Dirichlet energy on the inscribed ball
// of the truncation box, inverted-multipole outer condition u ~ c/|x| fitted
// from the previous iterate (two fixed-point passes).
CapacityResult classicalCapacity(const Shape& shape, const GridSpec& grid,
                                 const SolveOptions& opt = {});

struct SweepPoint {
  double s = 0.0;
  double caps = 0.0;
  double scaled = 0.0;  // (1-s) cap_s
  bool upperBoundOk = true;
};

struct SweepReport {
  std::vector<SweepPoint> points;
  double classicalCap = 0.0;
  double target = 0.0;        // (omega_n / 2) cap(shape)
  bool extrapolated = false;  // requires >= 3 ladder points
  double limitEstimate = 0.0;
  double relError = 0.0;
  double upperTol = 0.0;
};

// (1-s) cap_s along the ladder, linear-in-(1-s) extrapolation over the three
// largest s, comparison against (omega_n/2) cap, and the one-sided bound at
// each sampled point (checked for s >= 0.8 with slack upperTol).
SweepReport asymptoticSweep(const Shape& shape, const std::vector<double>& sLadder,
                            const GridSpec& grid, double upperTol = 0.05,
                            const SolveOptions& opt = {});

}  // namespace fracap
