#include "fracap/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <stdexcept>

namespace fracap {

namespace {

// padded row-major layout (z slowest for n=3), real array of size
// pad[2]*pad[1]*pad[0] with x fastest
std::size_t padFlat(const std::array<int, 3>& pad, int n, int ix, int iy, int iz) {
  std::size_t f = 0;
  if (n > 2) f = (std::size_t)iz;
  if (n > 1) f = f * pad[1] + iy;
  f = f * pad[0] + ix;
  return f;
}

}  // namespace

Convolver::Convolver(int n, std::array<int, 3> dims) : n_(n), dims_(dims) {
  if (n < 1 || n > 3) throw std::domain_error("Convolver: n must be 1..3");
  logical_ = 1;
  for (int k = 0; k < n; ++k) {
    if (dims_[k] < 1) throw std::domain_error("Convolver: bad dims");
    pad_[k] = 2 * dims_[k];
    logical_ *= (std::size_t)dims_[k];
  }
  for (int k = n; k < 3; ++k) {
    dims_[k] = 1;
    pad_[k] = 1;
  }
  padReal_ = (std::size_t)pad_[0] * pad_[1] * pad_[2];
  padComplex_ = (std::size_t)(pad_[0] / 2 + 1) * pad_[1] * pad_[2];

  real_ = fftw_alloc_real(padReal_);
  spec_ = fftw_alloc_complex(padComplex_);
  kernelSpec_ = fftw_alloc_complex(padComplex_);
  if (!real_ || !spec_ || !kernelSpec_) throw std::bad_alloc();

  // FFTW wants sizes slowest-first
  int sizes[3];
  int rank = n_;
  for (int k = 0; k < n_; ++k) sizes[k] = pad_[n_ - 1 - k];
  planFwd_ = fftw_plan_dft_r2c(rank, sizes, real_, (fftw_complex*)spec_, FFTW_ESTIMATE);
  planBwd_ = fftw_plan_dft_c2r(rank, sizes, (fftw_complex*)spec_, real_, FFTW_ESTIMATE);
  if (!planFwd_ || !planBwd_) throw std::runtime_error("Convolver: fftw plan failed");
}

Convolver::~Convolver() {
  if (planFwd_) fftw_destroy_plan((fftw_plan)planFwd_);
  if (planBwd_) fftw_destroy_plan((fftw_plan)planBwd_);
  fftw_free(real_);
  fftw_free(spec_);
  fftw_free(kernelSpec_);
}

void Convolver::setKernel(const std::function<double(const std::array<int, 3>&)>& kernel) {
  std::memset(real_, 0, padReal_ * sizeof(double));
  const int dx = dims_[0], dy = n_ > 1 ? dims_[1] : 1, dz = n_ > 2 ? dims_[2] : 1;
  for (int oz = -(dz - 1); oz <= dz - 1; ++oz)
    for (int oy = -(dy - 1); oy <= dy - 1; ++oy)
      for (int ox = -(dx - 1); ox <= dx - 1; ++ox) {
        std::array<int, 3> off{ox, oy, oz};
        const double w = kernel(off);
        if (w == 0.0) continue;
        const int ix = ox >= 0 ? ox : ox + pad_[0];
        const int iy = oy >= 0 ? oy : oy + pad_[1];
        const int iz = oz >= 0 ? oz : oz + pad_[2];
        real_[padFlat(pad_, n_, ix, iy, iz)] = w;
      }
  fftw_execute_dft_r2c((fftw_plan)planFwd_, real_, (fftw_complex*)kernelSpec_);
}

void Convolver::apply(const std::vector<double>& in, std::vector<double>& out) const {
  if (in.size() != logical_) throw std::invalid_argument("Convolver: size mismatch");
  std::memset(real_, 0, padReal_ * sizeof(double));
  const int dx = dims_[0], dy = n_ > 1 ? dims_[1] : 1, dz = n_ > 2 ? dims_[2] : 1;
  for (int iz = 0; iz < dz; ++iz)
    for (int iy = 0; iy < dy; ++iy) {
      const double* src = in.data() + ((std::size_t)iz * dy + iy) * dx;
      double* dst = real_ + padFlat(pad_, n_, 0, iy, iz);
      std::memcpy(dst, src, (std::size_t)dx * sizeof(double));
    }
  fftw_execute_dft_r2c((fftw_plan)planFwd_, real_, (fftw_complex*)spec_);
  fftw_complex* s = (fftw_complex*)spec_;
  const fftw_complex* k = (const fftw_complex*)kernelSpec_;
  const double scale = 1.0 / (double)padReal_;
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < (long long)padComplex_; ++i) {
    const double re = s[i][0] * k[i][0] - s[i][1] * k[i][1];
    const double im = s[i][0] * k[i][1] + s[i][1] * k[i][0];
    s[i][0] = re * scale;
    s[i][1] = im * scale;
  }
  fftw_execute_dft_c2r((fftw_plan)planBwd_, (fftw_complex*)spec_, real_);
  out.resize(logical_);
  for (int iz = 0; iz < dz; ++iz)
    for (int iy = 0; iy < dy; ++iy) {
      const double* src = real_ + padFlat(pad_, n_, 0, iy, iz);
      double* dst = out.data() + ((std::size_t)iz * dy + iy) * dx;
      std::memcpy(dst, src, (std::size_t)dx * sizeof(double));
    }
}

}  // namespace fracap
