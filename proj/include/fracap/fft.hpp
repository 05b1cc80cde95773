#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace fracap {

// Zero-padded lattice convolution out[i] = sum_j K[i-j] in[j] on an
// n-dimensional index box, evaluated through FFTW r2c/c2r transforms of the
// doubled grid. This computes the exact Toeplitz matvec of the assembled
// kernel table (no symbol-level approximation); plans use FFTW_ESTIMATE so
// the arithmetic path is reproducible run to run.
class Convolver {
 public:
  Convolver(int n, std::array<int, 3> dims);
  ~Convolver();
  Convolver(const Convolver&) = delete;
  Convolver& operator=(const Convolver&) = delete;

  // kernel(offset) with offset components in (-dims[k], dims[k])
  void setKernel(const std::function<double(const std::array<int, 3>&)>& kernel);

  void apply(const std::vector<double>& in, std::vector<double>& out) const;

  std::size_t logicalSize() const { return logical_; }

 private:
  int n_;
  std::array<int, 3> dims_{1, 1, 1};
  std::array<int, 3> pad_{1, 1, 1};
  std::size_t logical_ = 0;
  std::size_t padReal_ = 0;
  std::size_t padComplex_ = 0;
  double* real_ = nullptr;        // padded real work array
  void* spec_ = nullptr;          // fftw_complex* spectrum work
  void* kernelSpec_ = nullptr;    // fftw_complex* kernel spectrum
  void* planFwd_ = nullptr;
  void* planBwd_ = nullptr;
};

}  // namespace fracap
