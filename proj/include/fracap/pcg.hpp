#pragma once

#include <functional>
#include <vector>

namespace fracap {

struct PcgOutcome {
  int iterations = 0;
  double relResidual = 0.0;
  bool converged = false;
};

// Preconditioned conjugate gradients with deterministic reductions.
// applyA and prec map full-size vectors; entries outside the free set must be
// kept zero by the callbacks.
PcgOutcome pcg(std::size_t N,
               const std::function<void(const std::vector<double>&, std::vector<double>&)>& applyA,
               const std::function<void(const std::vector<double>&, std::vector<double>&)>& prec,
               const std::vector<double>& b, std::vector<double>& x, double tol, int maxIter);

}  // namespace fracap
