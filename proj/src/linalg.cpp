// SPDX-License-Identifier: Apache-2.0
#include "fadg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "fadg/error.hpp"

namespace fadg {

BlockDiagMatrix::BlockDiagMatrix(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {
  offsets_.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    offsets_.push_back(size_);
    size_ += static_cast<std::size_t>(b.rows());
  }
}

Vector BlockDiagMatrix::apply(const Vector& x) const {
  Vector y(x.size());
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto n = blocks_[k].rows();
    y.segment(static_cast<Eigen::Index>(offsets_[k]), n).noalias() =
        blocks_[k] * x.segment(static_cast<Eigen::Index>(offsets_[k]), n);
  }
  return y;
}

Matrix BlockDiagMatrix::apply(const Matrix& x) const {
  Matrix y(x.rows(), x.cols());
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto n = blocks_[k].rows();
    const auto o = static_cast<Eigen::Index>(offsets_[k]);
    y.middleRows(o, n).noalias() = blocks_[k] * x.middleRows(o, n);
  }
  return y;
}

Matrix BlockDiagMatrix::to_dense() const {
  const auto n = static_cast<Eigen::Index>(size_);
  Matrix d = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto o = static_cast<Eigen::Index>(offsets_[k]);
    d.block(o, o, blocks_[k].rows(), blocks_[k].cols()) = blocks_[k];
  }
  return d;
}

SparseMatrix BlockDiagMatrix::to_sparse() const {
  std::vector<Eigen::Triplet<double, long>> trip;
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto o = static_cast<long>(offsets_[k]);
    const Matrix& b = blocks_[k];
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
      for (Eigen::Index r = 0; r < b.rows(); ++r) {
        if (b(r, c) != 0.0) trip.emplace_back(o + r, o + c, b(r, c));
      }
    }
  }
  SparseMatrix s(static_cast<long>(size_), static_cast<long>(size_));
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

BlockDiagMatrix BlockDiagMatrix::inverse() const {
  std::vector<Matrix> inv;
  inv.reserve(blocks_.size());
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    Eigen::LLT<Matrix> llt(blocks_[k]);
    if (llt.info() != Eigen::Success) {
      throw SolverError("mass block " + std::to_string(k) + " is not positive definite");
    }
    inv.push_back(llt.solve(Matrix::Identity(blocks_[k].rows(), blocks_[k].cols())));
    inv.back() = 0.5 * (inv.back() + inv.back().transpose()).eval();
  }
  return BlockDiagMatrix(std::move(inv));
}

BlockDiagMatrix BlockDiagMatrix::inverse_sqrt() const {
  std::vector<Matrix> out;
  out.reserve(blocks_.size());
  const bool diagonal = is_diagonal();
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    if (diagonal) {
      const Vector d = blocks_[k].diagonal();
      if ((d.array() <= 0.0).any()) {
        throw SolverError("mass block " + std::to_string(k) + " is not positive definite");
      }
      out.push_back(d.array().rsqrt().matrix().asDiagonal());
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(blocks_[k]);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
      throw SolverError("mass block " + std::to_string(k) + " is not positive definite");
    }
    out.push_back(es.operatorInverseSqrt());
  }
  return BlockDiagMatrix(std::move(out));
}

void BlockDiagMatrix::check_spd() const {
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    Eigen::LLT<Matrix> llt(blocks_[k]);
    if (llt.info() != Eigen::Success) {
      throw SolverError("mass block " + std::to_string(k) + " is not positive definite");
    }
  }
}

bool BlockDiagMatrix::is_diagonal(double tol) const {
  for (const auto& b : blocks_) {
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
      for (Eigen::Index r = 0; r < b.rows(); ++r) {
        if (r != c && std::abs(b(r, c)) > tol * std::abs(b(c, c))) return false;
      }
    }
  }
  return true;
}

SparseSymMatrix::SparseSymMatrix(const SparseMatrix& full_or_lower, double drop_tol) {
  SparseMatrix low = full_or_lower.triangularView<Eigen::Lower>();
  if (drop_tol > 0.0) {
    double m = 0.0;
    for (long k = 0; k < low.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(low, k); it; ++it) m = std::max(m, std::abs(it.value()));
    }
    const double cut = drop_tol * m;
    low.prune([cut](const long&, const long&, const double& v) { return std::abs(v) > cut; });
  }
  low.makeCompressed();
  lower_ = std::move(low);
}

Vector SparseSymMatrix::multiply(const Vector& x) const {
  Vector y = lower_.selfadjointView<Eigen::Lower>() * x;
  return y;
}

Matrix SparseSymMatrix::multiply(const Matrix& x) const {
  Matrix y = lower_.selfadjointView<Eigen::Lower>() * x;
  return y;
}

SparseMatrix SparseSymMatrix::full() const {
  SparseMatrix f = lower_.selfadjointView<Eigen::Lower>();
  return f;
}

Matrix SparseSymMatrix::to_dense() const { return Matrix(full()); }

double SparseSymMatrix::max_abs() const {
  double m = 0.0;
  for (long k = 0; k < lower_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(lower_, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

double SparseSymMatrix::norm_inf() const {
  Vector rows = Vector::Zero(lower_.rows());
  for (long k = 0; k < lower_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(lower_, k); it; ++it) {
      rows[it.row()] += std::abs(it.value());
      if (it.row() != it.col()) rows[it.col()] += std::abs(it.value());
    }
  }
  return rows.size() ? rows.maxCoeff() : 0.0;
}

long SparseSymMatrix::nnz_full() const {
  long n = 0;
  for (long k = 0; k < lower_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(lower_, k); it; ++it) n += it.row() == it.col() ? 1 : 2;
  }
  return n;
}

double SparseSymMatrix::nnz_percent() const {
  const double n = static_cast<double>(lower_.rows());
  return n > 0 ? 100.0 * static_cast<double>(nnz_full()) / (n * n) : 0.0;
}

void SparseSymMatrix::write_coordinate(std::ostream& os) const {
  const auto prec = os.precision();
  os << std::setprecision(17);
  // Row-major order for stable diffs.
  Eigen::SparseMatrix<double, Eigen::RowMajor, long> rm = lower_;
  for (long r = 0; r < rm.outerSize(); ++r) {
    for (decltype(rm)::InnerIterator it(rm, r); it; ++it) {
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    }
  }
  os.precision(prec);
}

} // namespace fadg
