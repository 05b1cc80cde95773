#pragma once

#include <functional>

namespace fracap {

// Adaptive Gauss-Kronrod (G7,K15) on a finite interval.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double relTol = 1e-10, double absTol = 1e-14, int maxDepth = 48);

// Semi-infinite [a, inf), kernel must decay; substitution t = a + u/(1-u).
double integrateToInf(const std::function<double(double)>& f, double a,
                      double relTol = 1e-10, double absTol = 1e-14);

}  // namespace fracap
