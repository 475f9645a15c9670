// Built with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "insulate/kernels.hpp"

namespace insulate::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline __m256d vabs(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

void element_misfit(std::size_t n, const double* w, const double* gx, const double* gy,
                    const double* yx, const double* yy, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(gx + i), _mm256_loadu_pd(yx + i));
    __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(gy + i), _mm256_loadu_pd(yy + i));
    __m256d s = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(w + i), s));
  }
  for (; i < n; ++i) {
    const double dx = gx[i] - yx[i];
    const double dy = gy[i] - yy[i];
    out[i] = w[i] * (dx * dx + dy * dy);
  }
}

void side_indicator(std::size_t n, const double* a, const double* b, double m, double* out) {
  const double s = 0.5 / m;
  const __m256d vm = _mm256_set1_pd(m);
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_fmadd_pd(vm, _mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_mul_pd(vs, t), t));
  }
  for (; i < n; ++i) {
    const double t = m * a[i] + b[i];
    out[i] = s * t * t;
  }
}

double weighted_dot(std::size_t n, const double* w, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d wx = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i));
    acc = _mm256_fmadd_pd(wx, _mm256_loadu_pd(y + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * x[i] * y[i];
  return s;
}

double weighted_abs_sum(std::size_t n, const double* w, const double* x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), vabs(_mm256_loadu_pd(x + i)), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * std::abs(x[i]);
  return s;
}

double max_abs(std::size_t n, const double* x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, vabs(_mm256_loadu_pd(x + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) s = std::max(s, std::abs(x[i]));
  return s;
}

void csr_matvec(std::size_t rows, const std::int32_t* row_ptr, const std::int32_t* col,
                const double* val, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const std::int32_t end = row_ptr[r + 1];
    std::int32_t k = row_ptr[r];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(col + k));
      __m256d xv = _mm256_i32gather_pd(x, idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(val + k), xv, acc);
    }
    double s = hsum(acc);
    for (; k < end; ++k) s += val[k] * x[col[k]];
    y[r] = s;
  }
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable t{"avx2",           element_misfit, side_indicator, weighted_dot,
                             weighted_abs_sum, max_abs,        csr_matvec};
  return t;
}

}  // namespace insulate::kernels
