#include "fracap/det.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fracap {

void applyThreadCap() {
#ifdef _OPENMP
  if (const char* env = std::getenv("FRACAP_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) omp_set_num_threads(t);
  }
#endif
}

}  // namespace fracap
