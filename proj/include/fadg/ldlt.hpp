// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <vector>

#include "fadg/linalg.hpp"

namespace fadg {

/// Counts of negative, zero and positive eigenvalues of a symmetric matrix.
struct Inertia {
  long negative = 0;
  long zero = 0;
  long positive = 0;

  friend bool operator==(const Inertia&, const Inertia&) = default;
};

/// Sparse symmetric LDL^T factorization over a block partition.
///
/// Blocks are eliminated in minimum-degree order of the block graph; each
/// pivot block is factored densely with Bunch-Kaufman pivoting, so D is
/// block diagonal with 1x1 and 2x2 pivots. By Sylvester's law of inertia the
/// signs of those pivots give the inertia of the input matrix.
///
/// A pivot with |d| <= zero_tol * ||S||_inf counts as zero. A zero pivot is
/// only accepted in a block without remaining coupling; otherwise the
/// factorization throws FactorizationBreakdown.
class BlockLdlt {
public:
  BlockLdlt(const SparseSymMatrix& s, const std::vector<int>& block_sizes,
            double zero_tol = 1e-12);
  /// Uniform partition; the last block takes the remainder.
  BlockLdlt(const SparseSymMatrix& s, int block_size, double zero_tol = 1e-12);

  [[nodiscard]] Inertia inertia() const { return inertia_; }
  [[nodiscard]] bool singular() const { return inertia_.zero > 0; }
  [[nodiscard]] std::size_t size() const { return n_; }

  /// Solves S x = b. Throws SolverError if a zero pivot was recorded.
  [[nodiscard]] Vector solve(const Vector& b) const;
  [[nodiscard]] Matrix solve(const Matrix& b) const;

  /// Stored entries of L plus D (diagnostic).
  [[nodiscard]] long factor_entries() const;

private:
  struct Pivot {
    Matrix lu;  // dsytrf output, lower part
    std::vector<int> ipiv;
  };

  void factor(const SparseSymMatrix& s, const std::vector<int>& block_sizes, double zero_tol);
  void pivot_solve(std::size_t k, Matrix& rhs) const;

  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_;  // by original block id
  std::vector<int> sizes_;            // by original block id
  std::vector<int> order_;            // elimination position -> block id
  std::vector<Pivot> pivots_;         // by position
  std::vector<std::map<int, Matrix>> lower_;  // by position: later position -> L block
  Inertia inertia_;
};

/// Block elimination order by minimum degree on the block graph. `adj` holds
/// the neighbours of every block (no self loops).
[[nodiscard]] std::vector<int> minimum_degree_order(const std::vector<std::vector<int>>& adj);

} // namespace fadg
