#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace insulate {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Compressed rows; column indices sorted and unique per row, explicit zeros kept.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols);
  // Duplicate (row, col) entries are summed.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> t);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return col_.size(); }
  const std::vector<std::int32_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::int32_t>& col_idx() const { return col_; }
  const std::vector<double>& values() const { return val_; }
  std::vector<double>& values() { return val_; }

  double coeff(std::size_t r, std::size_t c) const;
  SparseMatrix transpose() const;
  std::vector<Triplet> triplets() const;
  // Row-major dense copy, for tests and small problems.
  std::vector<double> to_dense() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::int32_t> row_ptr_{0};
  std::vector<std::int32_t> col_;
  std::vector<double> val_;
};

std::vector<double> matvec(const SparseMatrix& m, std::span<const double> x);

struct BlockPlacement {
  const SparseMatrix* block;
  std::size_t row;
  std::size_t col;
  double scale = 1.0;
  bool transpose = false;
};

// Overlapping entries of different blocks are summed.
SparseMatrix block_compose(std::size_t rows, std::size_t cols, std::span<const BlockPlacement> blocks);

// Sparse LU with partial pivoting and a fill-reducing column ordering.
// analyze() once per sparsity pattern, factorize() per set of values.
class DirectSolver {
 public:
  DirectSolver();
  ~DirectSolver();
  DirectSolver(DirectSolver&&) noexcept;
  DirectSolver& operator=(DirectSolver&&) noexcept;

  void analyze(const SparseMatrix& m);
  // Throws SingularMatrixError when a pivot falls below 1e-14 times the largest.
  void factorize(const SparseMatrix& m);
  std::vector<double> solve(std::span<const double> b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<double> solve_direct(const SparseMatrix& m, std::span<const double> b);

// "row col value" lines, 0-based, preceded by "rows cols nnz".
void write_coordinate(std::ostream& os, const SparseMatrix& m);

}  // namespace insulate
