#pragma once

// Inner loops shared by assembly, the estimators and the sparse matvec.
// A scalar reference table is always present; an AVX2+FMA table is compiled
// in on x86-64 and picked at first use when the CPU supports it.
// INSULATE_SIMD=scalar in the environment forces the reference path.

#include <cstddef>
#include <cstdint>

namespace insulate::kernels {

struct KernelTable {
  const char* name;
  // out[i] = w[i] * ((gx[i]-yx[i])^2 + (gy[i]-yy[i])^2)
  void (*element_misfit)(std::size_t n, const double* w, const double* gx, const double* gy,
                         const double* yx, const double* yy, double* out);
  // out[i] = (m*a[i] + b[i])^2 / (2m)
  void (*side_indicator)(std::size_t n, const double* a, const double* b, double m, double* out);
  double (*weighted_dot)(std::size_t n, const double* w, const double* x, const double* y);
  double (*weighted_abs_sum)(std::size_t n, const double* w, const double* x);
  double (*max_abs)(std::size_t n, const double* x);
  void (*csr_matvec)(std::size_t rows, const std::int32_t* row_ptr, const std::int32_t* col,
                     const double* val, const double* x, double* y);
};

const KernelTable& scalar_table();
// nullptr when not compiled in or not supported by the running CPU.
const KernelTable* avx2_table();
// The table used by the library.
const KernelTable& active();

}  // namespace insulate::kernels
