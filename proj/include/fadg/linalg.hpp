// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace fadg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, long>;

/// Global numbering: cell-contiguous blocks of equal size.
class DofMap {
public:
  DofMap() = default;
  DofMap(std::size_t num_cells, int block_size) : num_cells_(num_cells), block_(block_size) {}

  [[nodiscard]] std::size_t offset(std::size_t cell) const { return cell * static_cast<std::size_t>(block_); }
  [[nodiscard]] int block_size() const { return block_; }
  [[nodiscard]] std::size_t num_cells() const { return num_cells_; }
  [[nodiscard]] std::size_t size() const { return num_cells_ * static_cast<std::size_t>(block_); }

private:
  std::size_t num_cells_ = 0;
  int block_ = 0;
};

/// Block-diagonal matrix with one dense symmetric block per cell.
class BlockDiagMatrix {
public:
  BlockDiagMatrix() = default;
  explicit BlockDiagMatrix(std::vector<Matrix> blocks);

  [[nodiscard]] std::size_t num_blocks() const { return blocks_.size(); }
  [[nodiscard]] const Matrix& block(std::size_t k) const { return blocks_[k]; }
  [[nodiscard]] const std::vector<Matrix>& blocks() const { return blocks_; }
  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] std::size_t offset(std::size_t k) const { return offsets_[k]; }

  [[nodiscard]] Vector apply(const Vector& x) const;
  [[nodiscard]] Matrix apply(const Matrix& x) const;
  [[nodiscard]] Matrix to_dense() const;
  [[nodiscard]] SparseMatrix to_sparse() const;

  /// Blockwise inverse via Cholesky; throws SolverError on a non-SPD block.
  [[nodiscard]] BlockDiagMatrix inverse() const;
  /// Blockwise symmetric M^{-1/2}; throws SolverError on a non-SPD block.
  [[nodiscard]] BlockDiagMatrix inverse_sqrt() const;
  /// Throws SolverError unless every block is symmetric positive definite.
  void check_spd() const;
  [[nodiscard]] bool is_diagonal(double tol = 0.0) const;

private:
  std::vector<Matrix> blocks_;
  std::vector<std::size_t> offsets_;
  std::size_t size_ = 0;
};

/// Symmetric sparse matrix; only the lower triangle (row >= col) is stored.
class SparseSymMatrix {
public:
  SparseSymMatrix() = default;
  /// Keeps the lower triangle of `full_or_lower`. Entries with magnitude
  /// <= drop_tol * max|entry| are removed.
  explicit SparseSymMatrix(const SparseMatrix& full_or_lower, double drop_tol = 0.0);

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(lower_.rows()); }
  [[nodiscard]] const SparseMatrix& lower() const { return lower_; }

  [[nodiscard]] Vector multiply(const Vector& x) const;
  [[nodiscard]] Matrix multiply(const Matrix& x) const;
  [[nodiscard]] SparseMatrix full() const;
  [[nodiscard]] Matrix to_dense() const;
  [[nodiscard]] double max_abs() const;
  /// Max absolute row sum of the full matrix.
  [[nodiscard]] double norm_inf() const;
  /// Stored entries of the full matrix (off-diagonals counted twice).
  [[nodiscard]] long nnz_full() const;
  /// Percentage of nonzero entries of the full matrix.
  [[nodiscard]] double nnz_percent() const;

  /// Coordinate text: `row col value`, 1-based, lower triangle.
  void write_coordinate(std::ostream& os) const;

private:
  SparseMatrix lower_;
};

} // namespace fadg
