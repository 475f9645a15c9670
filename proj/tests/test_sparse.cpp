#include <cmath>
#include <sstream>

#include "doctest.h"
#include "insulate/errors.hpp"
#include "insulate/sparse.hpp"
#include "oracles.hpp"

using namespace insulate;
using doctest::Approx;

namespace {

double max_residual(const SparseMatrix& m, const std::vector<double>& x, const std::vector<double>& b) {
  const auto r = matvec(m, x);
  double e = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) e = std::max(e, std::abs(r[i] - b[i]));
  return e;
}

double inf_norm(const std::vector<double>& v) {
  double e = 0.0;
  for (double x : v) e = std::max(e, std::abs(x));
  return e;
}

// Diagonally dominant random sparse matrix.
SparseMatrix random_matrix(oracle::Rng& rng, std::size_t n, int per_row) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, static_cast<double>(per_row) + 1.0 + oracle::uniform(rng, 0, 1)});
    for (int k = 0; k < per_row; ++k) t.push_back({i, rng() % n, oracle::uniform(rng)});
  }
  return SparseMatrix::from_triplets(n, n, t);
}

}  // namespace

TEST_CASE("from_triplets sums duplicates, sorts columns and keeps explicit zeros") {
  const SparseMatrix m = SparseMatrix::from_triplets(2, 3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 3.0}, {1, 1, 0.0}});
  CHECK(m.nnz() == 3);
  CHECK(m.coeff(0, 2) == 4.0);
  CHECK(m.coeff(0, 0) == 2.0);
  CHECK(m.coeff(1, 1) == 0.0);
  CHECK(m.coeff(1, 2) == 0.0);
  CHECK(m.col_idx()[0] == 0);
  CHECK(m.col_idx()[1] == 2);
  const SparseMatrix t = m.transpose();
  CHECK(t.rows() == 3);
  CHECK(t.coeff(2, 0) == 4.0);
  CHECK(t.nnz() == 3);
}

TEST_CASE("solve_direct examples") {
  SUBCASE("identity") {
    const SparseMatrix id = SparseMatrix::from_triplets(3, 3, {{0, 0, 1}, {1, 1, 1}, {2, 2, 1}});
    const auto x = solve_direct(id, std::vector<double>{1, 2, 3});
    CHECK(x == std::vector<double>{1, 2, 3});
  }
  SUBCASE("permutation forces pivoting") {
    const SparseMatrix p = SparseMatrix::from_triplets(2, 2, {{0, 1, 1}, {1, 0, 1}});
    const auto x = solve_direct(p, std::vector<double>{1, 2});
    CHECK(x[0] == Approx(2.0));
    CHECK(x[1] == Approx(1.0));
  }
  SUBCASE("random 50x50 residual") {
    oracle::Rng rng(1);
    const SparseMatrix m = random_matrix(rng, 50, 4);
    std::vector<double> b(50);
    for (double& v : b) v = oracle::uniform(rng);
    const auto x = solve_direct(m, b);
    CHECK(max_residual(m, x, b) <= 1e-10 * (1.0 + inf_norm(b)));
  }
  SUBCASE("badly scaled but regular") {
    const SparseMatrix m = SparseMatrix::from_triplets(3, 3, {{0, 0, 1e-12}, {1, 1, 1e6}, {2, 2, 1.0}, {0, 2, 1e-13}});
    const auto x = solve_direct(m, std::vector<double>{1e-12, 1e6, 1.0});
    CHECK(x[0] == Approx(0.9));
    CHECK(x[1] == Approx(1.0));
    CHECK(x[2] == Approx(1.0));
  }
}

TEST_CASE("singular matrices are reported") {
  SUBCASE("structurally singular") {
    const SparseMatrix m = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 0, 1.0}});
    CHECK_THROWS_AS(solve_direct(m, std::vector<double>{1, 1}), SingularMatrixError);
  }
  SUBCASE("numerically singular") {
    const SparseMatrix m = SparseMatrix::from_triplets(3, 3, {{0, 0, 1}, {0, 1, 2}, {1, 0, 2}, {1, 1, 4}, {2, 2, 1}});
    try {
      solve_direct(m, std::vector<double>{1, 2, 3});
      FAIL("expected SingularMatrixError");
    } catch (const SingularMatrixError& e) {
      CHECK(e.pivot() < 3);
    }
  }
  SUBCASE("not square") {
    const SparseMatrix m(2, 3);
    CHECK_THROWS_AS(solve_direct(m, std::vector<double>{1, 1}), Error);
  }
}

TEST_CASE("solve composed with matvec is the identity") {
  oracle::Rng rng(2);
  for (std::size_t n : {5u, 40u, 300u}) {
    const SparseMatrix m = random_matrix(rng, n, 5);
    DirectSolver lu;
    lu.analyze(m);
    lu.factorize(m);
    for (int rep = 0; rep < 3; ++rep) {
      std::vector<double> x(n);
      for (double& v : x) v = oracle::uniform(rng);
      const auto y = lu.solve(matvec(m, x));
      for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == Approx(x[i]).epsilon(1e-9).scale(1.0));
    }
    // refactorize with new values on the same pattern
    SparseMatrix m2 = m;
    for (double& v : m2.values()) v *= 2.0;
    lu.factorize(m2);
    std::vector<double> b(n, 1.0);
    CHECK(max_residual(m2, lu.solve(b), b) <= 1e-10 * 2.0);
  }
}

TEST_CASE("block_compose") {
  oracle::Rng rng(3);
  std::vector<Triplet> ta, tb;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      ta.push_back({i, j, oracle::uniform(rng)});
      tb.push_back({i, j, oracle::uniform(rng)});
    }
  const SparseMatrix A = SparseMatrix::from_triplets(3, 3, ta), B = SparseMatrix::from_triplets(3, 3, tb);
  SUBCASE("saddle point matrix against a dense reference") {
    const BlockPlacement blocks[] = {{&A, 0, 0}, {&B, 0, 3, 1.0, true}, {&B, 3, 0}};
    const SparseMatrix K = block_compose(6, 6, blocks);
    const auto d = K.to_dense();
    const auto da = A.to_dense(), db = B.to_dense();
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(d[i * 6 + j] == da[i * 3 + j]);
        CHECK(d[i * 6 + 3 + j] == db[j * 3 + i]);
        CHECK(d[(3 + i) * 6 + j] == db[i * 3 + j]);
        CHECK(d[(3 + i) * 6 + 3 + j] == 0.0);
      }
  }
  SUBCASE("empty list gives the zero matrix") {
    const SparseMatrix Z = block_compose(4, 2, {});
    CHECK(Z.rows() == 4);
    CHECK(Z.cols() == 2);
    CHECK(Z.nnz() == 0);
  }
  SUBCASE("transposed placement equals the explicit transpose; overlaps add") {
    const SparseMatrix Bt = B.transpose();
    const BlockPlacement p1[] = {{&B, 0, 0, 1.0, true}};
    const BlockPlacement p2[] = {{&Bt, 0, 0}};
    CHECK(block_compose(3, 3, p1).to_dense() == block_compose(3, 3, p2).to_dense());
    const BlockPlacement twice[] = {{&A, 0, 0}, {&A, 0, 0, -1.0}};
    for (double v : block_compose(3, 3, twice).to_dense()) CHECK(v == 0.0);
  }
  SUBCASE("block outside the target") {
    const BlockPlacement bad[] = {{&A, 2, 0}};
    CHECK_THROWS_AS(block_compose(4, 4, bad), Error);
  }
}

TEST_CASE("coordinate dump") {
  const SparseMatrix m = SparseMatrix::from_triplets(2, 2, {{1, 0, 0.5}});
  std::ostringstream os;
  write_coordinate(os, m);
  CHECK(os.str() == "2 2 1\n1 0 0.5\n");
}
