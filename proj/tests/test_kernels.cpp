#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "insulate/kernels.hpp"
#include "oracles.hpp"

using namespace insulate;
namespace k = insulate::kernels;

namespace {

std::vector<double> random_vector(oracle::Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = oracle::uniform(rng);
  return v;
}

// Sizes hitting the vector body, the remainder loop and the empty case.
const std::size_t kSizes[] = {0, 1, 3, 4, 5, 7, 8, 17, 64, 1001};

}  // namespace

TEST_CASE("scalar table is always available and active honours INSULATE_SIMD") {
  CHECK(std::strcmp(k::scalar_table().name, "scalar") == 0);
  const char* env = std::getenv("INSULATE_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) CHECK(&k::active() == &k::scalar_table());
  else if (k::avx2_table()) CHECK(&k::active() == k::avx2_table());
}

TEST_CASE("scalar kernels on hand-computed inputs") {
  const auto& t = k::scalar_table();
  const double w[] = {2.0, 0.5}, gx[] = {1.0, 0.0}, gy[] = {0.0, 2.0}, yx[] = {0.0, 1.0}, yy[] = {1.0, 0.0};
  double out[2];
  t.element_misfit(2, w, gx, gy, yx, yy, out);
  CHECK(out[0] == 4.0);
  CHECK(out[1] == 2.5);
  const double a[] = {1.0, 0.5}, b[] = {-3.0, 1.0};
  t.side_indicator(2, a, b, 3.0, out);
  CHECK(out[0] == 0.0);  // perfect square at b = -m a
  CHECK(out[1] == doctest::Approx(2.5 * 2.5 / 6.0));
  CHECK(t.weighted_dot(2, w, gx, gy) == 0.0);
  const double x[] = {-1.0, 3.0};
  CHECK(t.weighted_abs_sum(2, w, x) == 3.5);
  CHECK(t.max_abs(2, x) == 3.0);
  CHECK(t.max_abs(0, x) == 0.0);
}

TEST_CASE("csr matvec matches a dense product") {
  // [[1,0,2],[0,0,0],[3,4,0]]
  const std::int32_t rp[] = {0, 2, 2, 4}, col[] = {0, 2, 0, 1};
  const double val[] = {1, 2, 3, 4}, x[] = {1, 10, 100};
  double y[3];
  k::scalar_table().csr_matvec(3, rp, col, val, x, y);
  CHECK(y[0] == 201.0);
  CHECK(y[1] == 0.0);
  CHECK(y[2] == 43.0);
}

TEST_CASE("vector kernels agree with the scalar reference") {
  const k::KernelTable* v = k::avx2_table();
  if (!v) {
    MESSAGE("no vector table on this host");
    return;
  }
  const auto& s = k::scalar_table();
  oracle::Rng rng(11);
  for (std::size_t n : kSizes) {
    CAPTURE(n);
    const auto w = random_vector(rng, n), gx = random_vector(rng, n), gy = random_vector(rng, n),
               yx = random_vector(rng, n), yy = random_vector(rng, n);
    std::vector<double> o1(n), o2(n);
    s.element_misfit(n, w.data(), gx.data(), gy.data(), yx.data(), yy.data(), o1.data());
    v->element_misfit(n, w.data(), gx.data(), gy.data(), yx.data(), yy.data(), o2.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(o2[i] == doctest::Approx(o1[i]).epsilon(1e-14));
    s.side_indicator(n, gx.data(), gy.data(), 1.7, o1.data());
    v->side_indicator(n, gx.data(), gy.data(), 1.7, o2.data());
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(o2[i] >= 0.0);
      CHECK(o2[i] == doctest::Approx(o1[i]).epsilon(1e-14));
    }
    CHECK(v->weighted_dot(n, w.data(), gx.data(), gy.data()) ==
          doctest::Approx(s.weighted_dot(n, w.data(), gx.data(), gy.data())).epsilon(1e-12));
    CHECK(v->weighted_abs_sum(n, w.data(), gx.data()) ==
          doctest::Approx(s.weighted_abs_sum(n, w.data(), gx.data())).epsilon(1e-12));
    CHECK(v->max_abs(n, gx.data()) == s.max_abs(n, gx.data()));
  }
}

TEST_CASE("vector csr matvec agrees with the scalar reference on random patterns") {
  const k::KernelTable* v = k::avx2_table();
  if (!v) return;
  oracle::Rng rng(5);
  for (std::size_t rows : {1, 9, 200}) {
    std::vector<std::int32_t> rp{0}, col;
    std::vector<double> val;
    for (std::size_t r = 0; r < rows; ++r) {
      const int len = static_cast<int>(rng() % 12);
      for (int j = 0; j < len; ++j) {
        col.push_back(static_cast<std::int32_t>(rng() % rows));
        val.push_back(oracle::uniform(rng));
      }
      rp.push_back(static_cast<std::int32_t>(col.size()));
    }
    const auto x = random_vector(rng, rows);
    std::vector<double> y1(rows), y2(rows);
    k::scalar_table().csr_matvec(rows, rp.data(), col.data(), val.data(), x.data(), y1.data());
    v->csr_matvec(rows, rp.data(), col.data(), val.data(), x.data(), y2.data());
    for (std::size_t i = 0; i < rows; ++i) CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-13));
  }
}
