// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fadg/ldlt.hpp"
#include "fadg/linalg.hpp"

namespace fadg {

/// Band [0, lambda_max] of A x = lambda M x.
struct BandRequest {
  double lambda_max = 0.2;
  /// Relative residual tolerance: ||A x - lambda M x|| <= tolerance * ||A|| ||x||.
  double tolerance = 1e-10;
  /// Cap on the total number of Krylov vectors over all restarts.
  std::size_t max_subspace = 20000;
  std::uint64_t seed = 12345;

  void validate() const;
};

struct EigenSolution {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // M-orthonormal columns
  Vector residuals;     // ||A x - lambda M x||_2 / ||x||_2
  long inertia_count = -1;  // negative pivots of A - lambda_max M; -1 when not computed
  double norm_a = 0.0;
  std::vector<std::string> warnings;

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

/// Largest problem accepted by the dense paths.
inline constexpr std::size_t kDenseCap = 8192;

/// Full spectrum of the dense pair (A, M) via Cholesky reduction.
[[nodiscard]] EigenSolution dense_generalized_eig(const Matrix& a, const Matrix& m);

/// Eigenpairs of the dense pair with eigenvalue in (-inf, upper].
[[nodiscard]] EigenSolution dense_band_eig(const Matrix& a, const Matrix& m, double upper);

/// Signature of S from a block LDL^T factorization.
[[nodiscard]] Inertia ldl_inertia(const SparseSymMatrix& s, int block_size = 32,
                                  double zero_tol = 1e-12);

/// S = A - shift * M, with M block diagonal.
[[nodiscard]] SparseSymMatrix shifted(const SparseSymMatrix& a, const BlockDiagMatrix& m,
                                      double shift);

/// All eigenpairs of A x = lambda M x with lambda <= lambda_max.
///
/// Shift-invert Lanczos about lambda_max / 2 in the M inner product with
/// full reorthogonalization. Converged pairs are locked and the iteration
/// restarts from a fresh vector orthogonal to them, which also picks up the
/// second vector of a degenerate pair. The returned count must equal the
/// number of negative pivots of A - lambda_max M; otherwise the solver
/// throws CompletenessError.
[[nodiscard]] EigenSolution band_eig(const SparseSymMatrix& a, const BlockDiagMatrix& m,
                                     const BandRequest& req);

/// Dense cross-check of band_eig with the same inertia certificate.
[[nodiscard]] EigenSolution band_eig_dense(const SparseSymMatrix& a, const BlockDiagMatrix& m,
                                           const BandRequest& req);

/// Residual norms ||A x_i - lambda_i M x_i|| / ||x_i|| for every column.
[[nodiscard]] Vector pair_residuals(const SparseSymMatrix& a, const BlockDiagMatrix& m,
                                    const Vector& values, const Matrix& vectors);

} // namespace fadg
