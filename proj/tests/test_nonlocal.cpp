#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fracap/constants.hpp"
#include "fracap/nonlocal.hpp"
#include "fracap/quadrature.hpp"

using namespace fracap;

namespace {

double hat1d(const Point& p) { return std::max(0.0, 1.0 - std::abs(p[0])); }

// 2-D adaptive quadrature oracle for the 1-D Gagliardo seminorm of the hat
// function at s = 1/2: the integrand (u(x)-u(y))^2 / (x-y)^2 is bounded
// (Lipschitz numerator), so panels split at the kinks and diagonal suffice.
double hatSeminormOracle() {
  auto u = [](double x) { return std::max(0.0, 1.0 - std::abs(x)); };
  auto inner = [&](double x) {
    auto f = [&](double y) {
      const double d = x - y;
      if (d == 0.0) return 1.0;  // Lipschitz limit along the diagonal
      const double q = (u(x) - u(y)) / d;
      return q * q;
    };
    double knots[6] = {-8.0, -1.0, 0.0, 1.0, x, 8.0};
    std::sort(std::begin(knots), std::end(knots));
    double v = 0.0;
    for (int i = 0; i + 1 < 6; ++i)
      if (knots[i + 1] > knots[i]) v += integrate(f, knots[i], knots[i + 1], 1e-10, 1e-13);
    // exterior |y| > 8: u(y) = 0
    const double ux = u(x);
    if (ux > 0.0) v += ux * ux * (1.0 / (8.0 - x) + 1.0 / (8.0 + x));
    return v;
  };
  return integrate(inner, -1.0, 1.0, 1e-8, 1e-12);
}

}  // namespace

TEST_CASE("seminorm: zero function") {
  GridSpec g{1, 128, 2.0};
  GridFunction u(g, 0.5);
  CHECK(gagliardoSeminorm(u) == 0.0);
}

TEST_CASE("seminorm: support touching the boundary layer is rejected") {
  GridSpec g{1, 64, 1.0};
  GridFunction u(g, 0.5);
  u.values[0] = 1.0;
  CHECK_THROWS_AS(gagliardoSeminorm(u), std::runtime_error);
}

TEST_CASE("seminorm: 1-D hat at s=1/2 matches the quadrature oracle to 1%") {
  const double oracle = hatSeminormOracle();
  GridSpec g{1, 1024, 8.0};
  GridFunction u(g, 0.5);
  for (std::size_t i = 0; i < g.cells(); ++i) u.values[i] = hat1d(g.center(g.unflatten(i)));
  const double disc = gagliardoSeminorm(u);
  CHECK(disc == doctest::Approx(oracle).epsilon(0.01));
}

TEST_CASE("seminorm: exact scaling across matched grids") {
  // u_lam(x) = u(x/lam) on the grid scaled by lam gives lam^{n-2s} [u]^2
  // exactly, by the homogeneity of every assembled weight
  auto bump = [](const Point& p) {
    const double r2 = p[0] * p[0] + p[1] * p[1];
    return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
  };
  const double s = 0.6;
  GridSpec g{2, 48, 2.0};
  GridFunction u(g, s);
  for (std::size_t i = 0; i < g.cells(); ++i) u.values[i] = bump(g.center(g.unflatten(i)));
  const double base = gagliardoSeminorm(u);
  CHECK(base > 0.0);

  const double lam = 2.0;
  GridSpec g2{2, 48, 2.0 * lam};
  GridFunction u2(g2, s);
  for (std::size_t i = 0; i < g2.cells(); ++i) {
    Point p = g2.center(g2.unflatten(i));
    Point q{p[0] / lam, p[1] / lam, 0};
    u2.values[i] = bump(q);
  }
  const double scaled = gagliardoSeminorm(u2);
  CHECK(scaled == doctest::Approx(std::pow(lam, 2.0 - 2.0 * s) * base).epsilon(1e-10));
}

TEST_CASE("form: symmetry and positive semidefiniteness on random vectors") {
  GridSpec g{2, 24, 1.5};
  const double s = 0.5;
  NonlocalForm form(g, s, std::vector<std::uint8_t>(g.cells(), 1),
                    g.R * std::sqrt(2.0), false);
  std::uint64_t st = 7;
  auto rnd = [&]() {
    st = st * 6364136223846793005ull + 1442695040888963407ull;
    return (double)(st >> 11) / 9007199254740992.0 - 0.5;
  };
  std::vector<double> u(g.cells()), v(g.cells());
  for (int rep = 0; rep < 3; ++rep) {
    for (auto& x : u) x = rnd();
    for (auto& x : v) x = rnd();
    CHECK(form.energy(u, 0.0) >= 0.0);
    std::vector<double> Mu, Mv;
    double gu = 0, gv = 0;
    form.applyM(u, 0.0, Mu, gu);
    form.applyM(v, 0.0, Mv, gv);
    double uMv = 0, vMu = 0, uMu = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      uMv += u[i] * Mv[i];
      vMu += v[i] * Mu[i];
      uMu += u[i] * Mu[i];
    }
    CHECK(uMv == doctest::Approx(vMu).epsilon(1e-10));
    CHECK(form.energy(u, 0.0) == doctest::Approx(uMu).epsilon(1e-9));
  }
}

TEST_CASE("direct capacity: ball solve, max principle, far amplitude") {
  Shape ball = Shape::ball(2, {0, 0, 0}, 1.0);
  GridSpec g{2, 48, 3.0};
  SolveOptions opt;
  opt.tol = 1e-10;
  auto r = fracCapacityDirect(ball, 0.5, g, opt);
  CHECK(r.value > 0.0);
  CHECK(r.iterations > 0);
  CHECK(r.residual <= 1e-10);
  CHECK(r.maxPrincipleViolation <= 1e-7);
  CHECK(r.farAmplitude > 0.0);
  CHECK(r.farAmplitude < 1.0);
  const auto& u = r.potential.values;
  std::size_t centerIdx = g.flatten({g.m / 2, g.m / 2, 0});
  CHECK(u[centerIdx] == doctest::Approx(1.0));
}

TEST_CASE("direct capacity: scaling law within 2%") {
  const double s = 0.5;
  Shape b1 = Shape::ball(2, {0, 0, 0}, 1.0);
  Shape b2 = Shape::ball(2, {0, 0, 0}, 2.0);
  GridSpec g1{2, 48, 3.0};
  GridSpec g2{2, 48, 6.0};
  const double c1 = fracCapacityDirect(b1, s, g1).value;
  const double c2 = fracCapacityDirect(b2, s, g2).value;
  CHECK(c2 == doctest::Approx(std::pow(2.0, 2.0 - 2.0 * s) * c1).epsilon(0.02));
}

TEST_CASE("direct capacity: monotone under nested shapes") {
  const double s = 0.5;
  GridSpec g{2, 48, 3.0};
  const double small = fracCapacityDirect(Shape::ball(2, {0, 0, 0}, 0.8), s, g).value;
  const double big = fracCapacityDirect(Shape::ball(2, {0, 0, 0}, 1.2), s, g).value;
  CHECK(small <= big * (1.0 + 1e-10));
  const double boxS =
      fracCapacityDirect(Shape::box(2, {-0.5, -0.5, 0}, {0.5, 0.5, 0}), s, g).value;
  const double boxB =
      fracCapacityDirect(Shape::box(2, {-0.9, -0.9, 0}, {0.9, 0.9, 0}), s, g).value;
  CHECK(boxS <= boxB * (1.0 + 1e-10));
}

TEST_CASE("direct capacity: truncation R vs 1.5R within the decay-rate budget") {
  const double s = 0.5;
  Shape ball = Shape::ball(2, {0, 0, 0}, 1.0);
  const double c1 = fracCapacityDirect(ball, s, GridSpec{2, 48, 3.0}).value;
  const double c2 = fracCapacityDirect(ball, s, GridSpec{2, 72, 4.5}).value;
  // u <= 2 R0^{n-2s}/|x|^{n-2s} gives a generous first-order excess bound
  const double bound = 4.0 * std::pow(1.0 / 3.0, 2.0 - 2.0 * s) * std::max(c1, c2);
  CHECK(std::abs(c1 - c2) <= bound);
  // the far-field ansatz keeps the two much closer than the raw bound
  CHECK(std::abs(c1 - c2) / c2 < 0.05);
}

TEST_CASE("direct capacity: refinement is consistent under Richardson extrapolation") {
  const double s = 0.5;
  Shape ball = Shape::ball(2, {0, 0, 0}, 1.0);
  const double cH = fracCapacityDirect(ball, s, GridSpec{2, 32, 3.0}).value;
  const double cH2 = fracCapacityDirect(ball, s, GridSpec{2, 64, 3.0}).value;
  const double cH4 = fracCapacityDirect(ball, s, GridSpec{2, 128, 3.0}).value;
  // successive corrections shrink, and the first-order Richardson value from
  // the finer pair stays within one last-jump of the finest estimate
  CHECK(std::abs(cH4 - cH2) <= std::abs(cH2 - cH) * 1.2 + 1e-12);
  const double rich = 2.0 * cH4 - cH2;
  CHECK(std::abs(rich - cH4) <= std::abs(cH4 - cH2) + 1e-12);
}

TEST_CASE("direct capacity: degenerate and out-of-range inputs") {
  GridSpec g{2, 32, 3.0};
  CHECK_THROWS_AS(fracCapacityDirect(Shape::ball(2, {0, 0, 0}, 0.01), 0.5, g),
                  std::domain_error);
  CHECK_THROWS_AS(fracCapacityDirect(Shape::ball(2, {0, 0, 0}, 2.9), 0.5, g),
                  std::runtime_error);
  CHECK_THROWS_AS(
      fracCapacityDirect(Shape::ball(1, {0, 0, 0}, 1.0), 0.75, GridSpec{1, 64, 3.0}),
      std::domain_error);
}
