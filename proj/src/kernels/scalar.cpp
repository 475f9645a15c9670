#include "insulate/kernels.hpp"

#include <cmath>

namespace insulate::kernels {
namespace {

void element_misfit(std::size_t n, const double* w, const double* gx, const double* gy,
                    const double* yx, const double* yy, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = gx[i] - yx[i];
    const double dy = gy[i] - yy[i];
    out[i] = w[i] * (dx * dx + dy * dy);
  }
}

void side_indicator(std::size_t n, const double* a, const double* b, double m, double* out) {
  const double s = 0.5 / m;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = m * a[i] + b[i];
    out[i] = s * t * t;
  }
}

double weighted_dot(std::size_t n, const double* w, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * x[i] * y[i];
  return s;
}

double weighted_abs_sum(std::size_t n, const double* w, const double* x) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * std::abs(x[i]);
  return s;
}

double max_abs(std::size_t n, const double* x) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s = std::max(s, std::abs(x[i]));
  return s;
}

void csr_matvec(std::size_t rows, const std::int32_t* row_ptr, const std::int32_t* col,
                const double* val, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::int32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k] * x[col[k]];
    y[r] = s;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{"scalar",     element_misfit, side_indicator, weighted_dot,
                             weighted_abs_sum, max_abs,     csr_matvec};
  return t;
}

}  // namespace insulate::kernels
