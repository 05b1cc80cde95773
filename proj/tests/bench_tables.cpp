// ad-hoc timing harness for the kernel tables; not registered with ctest
#include <chrono>
#include <cstdio>

#include "fracap/constants.hpp"
#include "fracap/kernels.hpp"

using namespace fracap;

static double now() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

int main() {
  for (int n : {1, 2, 3}) {
    for (double s : {0.5, 0.75}) {
      const double t0 = now();
      const auto& T = exteriorTables(n, s);
      const double t1 = now();
      const double m2 = nearFieldMoment(n, s);
      const double t2 = now();
      const double tauExpected = n * unitBallVolume(n) / (2.0 * s);
      std::printf(
          "n=%d s=%.2f  tables %6.2fs  m2 %6.2fs  J=%.6g  tau(0)=%.8g (expect %.8g)  "
          "m2=%.6g  omega=%.6g\n",
          n, s, t1 - t0, t2 - t1, T.J, T.tauHat(0.0), tauExpected, m2,
          nearFieldScale(n, s));
    }
  }
  return 0;
}
