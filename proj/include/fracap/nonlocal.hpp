#pragma once

#include <memory>
#include <string>

#include "fracap/fft.hpp"
#include "fracap/field.hpp"
#include "fracap/grid.hpp"

namespace fracap {

struct SolveOptions {
  double tol = 1e-8;
  int maxIterScale = 50;  // iteration cap = scale * sqrt(#unknowns)
  bool farField = true;   // monopole exterior ansatz coupled variationally
};

struct CapacityResult {
  double value = 0.0;   // cap_s estimate
  double energy = 0.0;  // minimized discrete energy
  double residual = 0.0;
  double h = 0.0, R = 0.0;
  int iterations = 0;
  std::string method;
  double farAmplitude = 0.0;
  double maxPrincipleViolation = 0.0;  // worst excursion outside [0,1] before clipping
  GridFunction potential;
};

// Discrete Gagliardo quadratic form on the truncation box:
//   - pairs at offset >= 2 cells: midpoint kernel weights,
//   - offset-one pairs: moment-matched near-field weights,
//   - continuum exterior {|y| > extRadius}: tail/monopole coupling from the
//     radial tables.
// Cells outside `active` carry no degrees of freedom; their region is part of
// the exterior model.
class NonlocalForm {
 public:
  NonlocalForm(const GridSpec& g, double s, std::vector<std::uint8_t> active,
               double extRadius, bool farField);

  const GridSpec& grid() const { return grid_; }
  double order() const { return s_; }
  const std::vector<std::uint8_t>& active() const { return active_; }

  // W * (active-embedded u)
  void convolve(const std::vector<double>& u, std::vector<double>& out) const;

  // full quadratic form value F(u, g)
  double energy(const std::vector<double>& u, double g) const;

  // SPD matvec of the bordered system, x = [u ; g]
  void applyM(const std::vector<double>& u, double g, std::vector<double>& outU,
              double& outG) const;

  const std::vector<double>& diagU() const { return diagU_; }
  double diagG() const { return diagG_; }

 private:
  GridSpec grid_;
  double s_;
  std::vector<std::uint8_t> active_;
  double extRadius_;
  bool farField_;
  std::unique_ptr<Convolver> conv_;
  std::vector<double> wTot_;   // (W * active)_i
  std::vector<double> tail_;   // h^n tau_i (active cells)
  std::vector<double> sigma_;  // h^n sigma_i
  double Mgg_ = 0.0;           // 2 h^n sum q_i + J_R
  std::vector<double> diagU_;
  double diagG_ = 0.0;
};

// [u]_s^2 of a compactly supported grid function (zero outermost layer).
double gagliardoSeminorm(const GridFunction& u);

// cap_s by direct minimization of the Gagliardo form, u = 1 on the shape.
CapacityResult fracCapacityDirect(const Shape& shape, double s, const GridSpec& grid,
                                  const SolveOptions& opt = {});

// Poisson-kernel extension slices U_phi(. , z) of a compactly supported trace;
// kernel lattice-normalized so the all-ones function extends to exactly one
// (exteriorValue continues phi outside the box, default zero).
ExtensionField poissonExtend(const GridFunction& phi, const std::vector<double>& zLevels,
                             double exteriorValue = 0.0);

}  // namespace fracap
