#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracap/extension.hpp"
#include "fracap/nonlocal.hpp"

namespace fracap {

struct PipelineConfig {
  int m = 64;                     // cells per axis
  double truncationFactor = 3.0;  // R = factor * circumradius about the origin
  double Z = 0.0;                 // half-space height; 0 = same as R
  int zLevels = 24;
  double gamma = 0.1;
  double C4 = 1.0;
  double assertTol = 0.04;  // additive tolerance printed with every assertion
  SolveOptions solve;
};

GridSpec autoGrid(const Shape& shape, const PipelineConfig& cfg);

// cap_s of the unit-radius ball at the matched relative grid (m cells,
// truncation rho). Cached; every deficit divides by this value.
double unitBallCapacity(int n, double s, int m, double rho, const std::string& method,
                        const PipelineConfig& cfg);

// serialization hooks for the on-disk cache (lives beside run outputs)
std::string ballCacheDump();
void ballCacheLoad(const std::string& json);

struct DeficitResult {
  double deficit = 0.0;
  double capacity = 0.0;            // cap_s(Omega)
  double capBallUnitRadius = 0.0;   // cached reference
  double normalizedBall = 0.0;      // |B|^{(2s-n)/n} cap_s(B), volume-free constant
  double volume = 0.0;              // rasterized |Omega| on the solve grid
  double asymmetry = 0.0;
  GridSpec grid;
  CapacityResult raw;
};

DeficitResult deficitResult(const Shape& shape, double s, const PipelineConfig& cfg,
                            const std::string& method = "direct");
double deficit(const Shape& shape, double s, const PipelineConfig& cfg,
               const std::string& method = "direct");

struct StabilityReport {
  std::string shapeId;
  int n = 0;
  double s = 0.0;
  double gamma = 0.1;
  double C4 = 1.0;
  double capDirect = 0.0;
  std::optional<double> capExtension;
  double capBallUnitRadius = 0.0;
  double ballCapacityEqualVolume = 0.0;
  double volume = 0.0;
  double deficit = 0.0;
  double asymmetry = 0.0;
  double stabilityConstantValue = 0.0;
  int stabilityConstantBranch = 1;
  double rhs = 0.0;              // C_{n,s} A^{3/s}
  bool rhsConditional = false;   // true when the C4-dependent branch is active
  std::string branch;            // largeGap | smallGap | rigid
  double T = 1.0, hatT = 0.0, kappa = 0.0;
  double tolerance = 0.04;
  // margins (>= 0 means the assertion holds)
  bool unconditionalApplicable = false;
  double unconditionalMargin = 0.0;  // d - 2^{-3/s} A^{3/s} (+tol applied by callers)
  double conditionalMargin = 0.0;    // d - rhs
  std::optional<double> smallGapChainMargin;  // eq. of the test-function route
  bool passed = true;  // the exit-status verdict at `tolerance`
};

StabilityReport verifyStability(const Shape& shape, double s, const PipelineConfig& cfg,
                                const std::string& method = "direct",
                                const std::string& shapeId = "shape");

struct ScanRow {
  std::string name;
  double A = 0.0, d = 0.0, rhs = 0.0, margin = 0.0;
  std::string branch;
};

struct ScanReport {
  std::vector<ScanRow> rows;
  bool fitDone = false;
  bool degenerate = false;
  bool underdetermined = false;
  double exponent = 0.0;
  double prefactor = 0.0;  // exp(intercept)
};

ScanReport sharpnessScan(const std::vector<std::pair<std::string, Shape>>& family, double s,
                         const PipelineConfig& cfg);

// threshold T of the trace potential: inf { t : mu(t) <= |O|(1 + gamma A) }
struct TraceThreshold {
  double T = 1.0;
  double hatT = 0.0;
  double muT = 0.0;  // measure at the threshold level
};
TraceThreshold thresholdFromTrace(const GridFunction& trace, double volume, double gamma,
                                  double asymmetry);

}  // namespace fracap
