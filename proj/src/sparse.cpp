#include "insulate/sparse.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "insulate/errors.hpp"
#include "insulate/kernels.hpp"
#include "insulate/types.hpp"

namespace insulate {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> t) {
  if (rows >= (std::size_t(1) << 31) || cols >= (std::size_t(1) << 31))
    throw Error("sparse matrix dimensions exceed 32-bit indices");
  for (const Triplet& e : t)
    if (e.row >= rows || e.col >= cols)
      throw Error("triplet (" + std::to_string(e.row) + "," + std::to_string(e.col) + ") out of range");
  std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m(rows, cols);
  m.col_.reserve(t.size());
  m.val_.reserve(t.size());
  std::size_t prev_row = npos, prev_col = 0;
  for (const Triplet& e : t) {
    if (e.row == prev_row && e.col == prev_col) {
      m.val_.back() += e.value;
      continue;
    }
    m.col_.push_back(static_cast<std::int32_t>(e.col));
    m.val_.push_back(e.value);
    ++m.row_ptr_[e.row + 1];
    prev_row = e.row;
    prev_col = e.col;
  }
  for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

double SparseMatrix::coeff(std::size_t r, std::size_t c) const {
  auto b = col_.begin() + row_ptr_[r], e = col_.begin() + row_ptr_[r + 1];
  auto it = std::lower_bound(b, e, static_cast<std::int32_t>(c));
  return (it != e && *it == static_cast<std::int32_t>(c)) ? val_[it - col_.begin()] : 0.0;
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::int32_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      t.push_back({r, static_cast<std::size_t>(col_[k]), val_[k]});
  return t;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t = triplets();
  for (Triplet& e : t) std::swap(e.row, e.col);
  return from_triplets(cols_, rows_, std::move(t));
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> d(rows_ * cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::int32_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) d[r * cols_ + col_[k]] += val_[k];
  return d;
}

std::vector<double> matvec(const SparseMatrix& m, std::span<const double> x) {
  if (x.size() != m.cols()) throw Error("matvec: dimension mismatch");
  std::vector<double> y(m.rows(), 0.0);
  if (m.rows() == 0) return y;
  kernels::active().csr_matvec(m.rows(), m.row_ptr().data(), m.col_idx().data(), m.values().data(),
                               x.data(), y.data());
  return y;
}

SparseMatrix block_compose(std::size_t rows, std::size_t cols, std::span<const BlockPlacement> blocks) {
  std::vector<Triplet> t;
  for (const BlockPlacement& b : blocks) {
    const std::size_t br = b.transpose ? b.block->cols() : b.block->rows();
    const std::size_t bc = b.transpose ? b.block->rows() : b.block->cols();
    if (b.row + br > rows || b.col + bc > cols) throw Error("block_compose: block exceeds target");
    for (Triplet e : b.block->triplets()) {
      if (b.transpose) std::swap(e.row, e.col);
      t.push_back({e.row + b.row, e.col + b.col, b.scale * e.value});
    }
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

namespace {

using EigenSp = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// Exposes the diagonal of U, which SparseLU keeps inside the supernodes of L.
class PivotLU : public Eigen::SparseLU<EigenSp, Eigen::COLAMDOrdering<int>> {
 public:
  // Smallest |U_jj| relative to the largest (of the equilibrated matrix); index j in elimination order.
  std::pair<double, Eigen::Index> weakest_pivot() const {
    double dmax = 0.0, dmin = INFINITY;
    Eigen::Index jmin = 0;
    for (Eigen::Index j = 0; j < cols(); ++j) {
      double d = 0.0;
      for (SCMatrix::InnerIterator it(m_Lstore, j); it; ++it) {
        if (it.row() < j) continue;
        if (it.row() == j) d = std::abs(it.value());
        break;
      }
      dmax = std::max(dmax, d);
      if (d < dmin) {
        dmin = d;
        jmin = j;
      }
    }
    return {dmax > 0.0 ? dmin / dmax : 0.0, jmin};
  }
};

EigenSp to_eigen(const SparseMatrix& m, const std::vector<double>& rs = {}, const std::vector<double>& cs = {}) {
  std::vector<Eigen::Triplet<double, int>> t;
  t.reserve(m.nnz());
  for (const Triplet& e : m.triplets()) {
    const double v = rs.empty() ? e.value : rs[e.row] * e.value * cs[e.col];
    t.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), v);
  }
  EigenSp a(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

std::size_t trailing_index(const std::string& msg) {
  const auto p = msg.find_last_not_of("0123456789");
  if (p == std::string::npos || p + 1 >= msg.size()) return npos;
  return std::stoul(msg.substr(p + 1));
}

// Maps an elimination-order column back to the input column.
std::size_t original_column(const PivotLU& lu, Eigen::Index j) {
  const auto& pc = lu.colsPermutation().indices();
  for (Eigen::Index i = 0; i < pc.size(); ++i)
    if (pc[i] == j) return static_cast<std::size_t>(i);
  return static_cast<std::size_t>(j);
}

double inf_norm(std::span<const double> v) { return kernels::active().max_abs(v.size(), v.data()); }

// Nearest power of two to 1/x, so scaling is exact in floating point.
double pow2_inverse(double x) { return x > 0.0 ? std::ldexp(1.0, -std::ilogb(x)) : 1.0; }

// Row then column equilibration: every row and column of diag(rs) M diag(cs) has max entry in [1,2).
void equilibrate(const SparseMatrix& m, std::vector<double>& rs, std::vector<double>& cs) {
  std::vector<double> rmax(m.rows(), 0.0), cmax(m.cols(), 0.0);
  for (const Triplet& e : m.triplets()) rmax[e.row] = std::max(rmax[e.row], std::abs(e.value));
  rs.resize(m.rows());
  for (std::size_t i = 0; i < rs.size(); ++i) rs[i] = pow2_inverse(rmax[i]);
  for (const Triplet& e : m.triplets()) cmax[e.col] = std::max(cmax[e.col], std::abs(rs[e.row] * e.value));
  cs.resize(m.cols());
  for (std::size_t j = 0; j < cs.size(); ++j) cs[j] = pow2_inverse(cmax[j]);
}

}  // namespace

struct DirectSolver::Impl {
  PivotLU lu;
  SparseMatrix m;
  std::vector<double> rs, cs;  // equilibration scales
  bool analyzed = false, factorized = false;
};

DirectSolver::DirectSolver() : impl_(std::make_unique<Impl>()) {}
DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

void DirectSolver::analyze(const SparseMatrix& m) {
  if (m.rows() != m.cols()) throw Error("solve_direct: matrix is not square");
  impl_->lu.analyzePattern(to_eigen(m));
  impl_->analyzed = true;
  impl_->factorized = false;
}

void DirectSolver::factorize(const SparseMatrix& m) {
  if (!impl_->analyzed) analyze(m);
  impl_->m = m;
  equilibrate(m, impl_->rs, impl_->cs);
  impl_->lu.factorize(to_eigen(m, impl_->rs, impl_->cs));
  if (impl_->lu.info() != Eigen::Success) {
    // Eigen reports the failing column 1-based in elimination order.
    const std::string msg = impl_->lu.lastErrorMessage();
    const std::size_t k = trailing_index(msg);
    const std::size_t col = k == npos || k == 0 ? npos : original_column(impl_->lu, static_cast<Eigen::Index>(k - 1));
    throw SingularMatrixError("singular matrix: " + msg, col);
  }
  if (m.rows() > 0) {
    const auto [ratio, j] = impl_->lu.weakest_pivot();
    if (ratio < 1e-14) {
      const std::size_t col = original_column(impl_->lu, j);
      char buf[96];
      std::snprintf(buf, sizeof buf, "singular matrix: relative pivot %.3e at column %zu", ratio, col);
      throw SingularMatrixError(buf, col);
    }
  }
  impl_->factorized = true;
}

std::vector<double> DirectSolver::solve(std::span<const double> b) const {
  if (!impl_->factorized) throw Error("DirectSolver::solve called before factorize");
  const SparseMatrix& m = impl_->m;
  if (b.size() != m.rows()) throw Error("solve_direct: right-hand side has wrong length");
  const auto scaled_solve = [&](std::span<const double> v) {
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) rhs[static_cast<Eigen::Index>(i)] = impl_->rs[i] * v[i];
    const Eigen::VectorXd y = impl_->lu.solve(rhs);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = impl_->cs[i] * y[static_cast<Eigen::Index>(i)];
    return out;
  };
  std::vector<double> xs = scaled_solve(b);
  const double tol = 1e-10 * (1.0 + inf_norm(b));
  for (int refine = 0;; ++refine) {
    std::vector<double> r = matvec(m, xs);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    const double res = inf_norm(r);
    if (res <= tol) break;
    if (refine == 2) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "solve_direct: residual %.3e above tolerance %.3e", res, tol);
      throw Error(buf);
    }
    const std::vector<double> dx = scaled_solve(r);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] += dx[i];
  }
  return xs;
}

std::vector<double> solve_direct(const SparseMatrix& m, std::span<const double> b) {
  DirectSolver s;
  s.analyze(m);
  s.factorize(m);
  return s.solve(b);
}

void write_coordinate(std::ostream& os, const SparseMatrix& m) {
  os << m.rows() << " " << m.cols() << " " << m.nnz() << "\n";
  char buf[48];
  for (const Triplet& e : m.triplets()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.value);
    os << e.row << " " << e.col << " " << buf << "\n";
  }
}

}  // namespace insulate
