// SPDX-License-Identifier: Apache-2.0
#include "fadg/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <lapacke.h>

#include "fadg/error.hpp"

namespace fadg {

void BandRequest::validate() const {
  if (!std::isfinite(lambda_max) || lambda_max <= 0.0) {
    throw ConfigError("lambda_max must be finite and > 0");
  }
  if (!(tolerance > 0.0)) throw ConfigError("solver tolerance must be > 0");
  if (max_subspace < 1) throw ConfigError("max_subspace must be >= 1");
}

Vector pair_residuals(const SparseSymMatrix& a, const BlockDiagMatrix& m, const Vector& values,
                      const Matrix& vectors) {
  Vector res(values.size());
  if (values.size() == 0) return res;
  const Matrix ax = a.multiply(vectors);
  const Matrix mx = m.apply(vectors);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double xn = vectors.col(i).norm();
    res[i] = xn > 0.0 ? (ax.col(i) - values[i] * mx.col(i)).norm() / xn : 0.0;
  }
  return res;
}

namespace {

void check_square(const Matrix& a, const Matrix& m) {
  if (a.rows() != a.cols() || m.rows() != m.cols() || a.rows() != m.rows()) {
    throw SolverError("dense eigenproblem: dimension mismatch");
  }
  if (static_cast<std::size_t>(a.rows()) > kDenseCap) {
    throw SolverError("dense eigenproblem larger than the dense cap");
  }
}

Vector dense_residuals(const Matrix& a, const Matrix& m, const Vector& w, const Matrix& v) {
  Vector res(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    res[i] = (a * v.col(i) - w[i] * (m * v.col(i))).norm() / v.col(i).norm();
  }
  return res;
}

std::vector<int> block_sizes_of(const BlockDiagMatrix& m) {
  std::vector<int> sizes;
  sizes.reserve(m.num_blocks());
  for (const auto& b : m.blocks()) sizes.push_back(static_cast<int>(b.rows()));
  return sizes;
}

/// Factors A - shift M, nudging the shift away from a breakdown or singular
/// point. Returns the factor and the shift actually used.
std::pair<std::unique_ptr<BlockLdlt>, double> factor_shifted(const SparseSymMatrix& a,
                                                             const BlockDiagMatrix& m,
                                                             double shift, double scale,
                                                             std::vector<std::string>& warnings) {
  const auto sizes = block_sizes_of(m);
  for (int attempt = 0; attempt < 6; ++attempt) {
    const double s = attempt == 0 ? shift : shift + scale * 1e-7 * std::pow(10.0, attempt) *
                                                   (attempt % 2 == 0 ? 1.0 : -1.0);
    try {
      auto f = std::make_unique<BlockLdlt>(shifted(a, m, s), sizes);
      if (!f->singular()) {
        if (attempt > 0) {
          std::ostringstream os;
          os.precision(17);
          os << "shift moved from " << shift << " to " << s << " after factorization breakdown";
          warnings.push_back(os.str());
        }
        return {std::move(f), s};
      }
    } catch (const FactorizationBreakdown&) {
      // try a perturbed shift
    }
  }
  throw FactorizationBreakdown("LDL^T factorization failed for every perturbed shift near " +
                               std::to_string(shift));
}

struct RitzPair {
  double lambda;
  Vector x;
};

} // namespace

EigenSolution dense_generalized_eig(const Matrix& a, const Matrix& m) {
  check_square(a, m);
  const auto n = static_cast<lapack_int>(a.rows());
  EigenSolution sol;
  if (n == 0) return sol;
  Matrix v = a;
  Matrix b = m;
  Vector w(n);
  const lapack_int info =
      LAPACKE_dsygvd(LAPACK_COL_MAJOR, 1, 'V', 'L', n, v.data(), n, b.data(), n, w.data());
  if (info > n) throw SolverError("dense eigenproblem: M is not positive definite");
  if (info != 0) throw SolverError("dense eigenproblem: dsygvd failed");
  sol.eigenvalues = w;
  sol.eigenvectors = std::move(v);
  sol.residuals = dense_residuals(a, m, sol.eigenvalues, sol.eigenvectors);
  sol.norm_a = a.cwiseAbs().rowwise().sum().maxCoeff();
  return sol;
}

EigenSolution dense_band_eig(const Matrix& a, const Matrix& m, double upper) {
  EigenSolution full = dense_generalized_eig(a, m);
  Eigen::Index count = 0;
  while (count < full.eigenvalues.size() && full.eigenvalues[count] <= upper) ++count;
  EigenSolution sol;
  sol.eigenvalues = full.eigenvalues.head(count);
  sol.eigenvectors = full.eigenvectors.leftCols(count);
  sol.residuals = full.residuals.head(count);
  sol.norm_a = full.norm_a;
  return sol;
}

Inertia ldl_inertia(const SparseSymMatrix& s, int block_size, double zero_tol) {
  return BlockLdlt(s, block_size, zero_tol).inertia();
}

SparseSymMatrix shifted(const SparseSymMatrix& a, const BlockDiagMatrix& m, double shift) {
  if (a.size() != m.size()) throw SolverError("operator and mass sizes differ");
  SparseMatrix low = a.lower();
  if (shift != 0.0) {
    SparseMatrix ml = m.to_sparse().triangularView<Eigen::Lower>();
    low = (low - shift * ml).pruned(0.0);
  }
  return SparseSymMatrix(low);
}

EigenSolution band_eig_dense(const SparseSymMatrix& a, const BlockDiagMatrix& m,
                             const BandRequest& req) {
  req.validate();
  EigenSolution sol = dense_band_eig(a.to_dense(), m.to_dense(), req.lambda_max);
  const auto [f, used] = factor_shifted(a, m, req.lambda_max, req.lambda_max, sol.warnings);
  const Inertia in = f->inertia();
  sol.inertia_count = in.negative;
  sol.norm_a = a.norm_inf();
  if (static_cast<long>(sol.size()) != sol.inertia_count) {
    throw CompletenessError("dense band count " + std::to_string(sol.size()) +
                            " differs from inertia count " + std::to_string(sol.inertia_count));
  }
  return sol;
}

EigenSolution band_eig(const SparseSymMatrix& a, const BlockDiagMatrix& m,
                       const BandRequest& req) {
  req.validate();
  const auto n = static_cast<Eigen::Index>(a.size());
  if (static_cast<std::size_t>(n) != m.size()) throw SolverError("operator and mass sizes differ");

  EigenSolution sol;
  sol.norm_a = a.norm_inf();
  const double lmax = req.lambda_max;

  // Completeness certificate.
  long target = 0;
  {
    auto [f, used] = factor_shifted(a, m, lmax, lmax, sol.warnings);
    target = f->inertia().negative;
  }
  sol.inertia_count = target;
  if (target == 0) {
    sol.eigenvalues.resize(0);
    sol.eigenvectors.resize(n, 0);
    sol.residuals.resize(0);
    return sol;
  }

  auto [factor, sigma] = factor_shifted(a, m, 0.5 * lmax, lmax, sol.warnings);

  // One step of iterative refinement when the factorization is inaccurate.
  const SparseSymMatrix s_op = shifted(a, m, sigma);
  bool refine = false;
  {
    std::mt19937_64 probe(req.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector b(n);
    for (Eigen::Index i = 0; i < n; ++i) b[i] = u(probe);
    const Vector x = factor->solve(b);
    refine = (b - s_op.multiply(x)).norm() > 1e-12 * b.norm() * (1.0 + x.norm() * s_op.norm_inf() / b.norm());
  }
  auto apply_op = [&](const Vector& mv) {
    Vector x = factor->solve(mv);
    if (refine) x += factor->solve(Vector(mv - s_op.multiply(x)));
    return x;
  };

  std::mt19937_64 rng(req.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Matrix locked(n, 0);
  Matrix mlocked(n, 0);
  std::vector<double> locked_vals;
  const double res_tol = req.tolerance * sol.norm_a;

  auto orth_locked = [&](Vector& w) {
    if (locked.cols() == 0) return;
    for (int pass = 0; pass < 2; ++pass) w -= locked * (mlocked.transpose() * w);
  };

  std::size_t budget_used = 0;
  int stalls = 0;
  while (static_cast<long>(locked_vals.size()) < target) {
    const long missing = target - static_cast<long>(locked_vals.size());
    const Eigen::Index room = n - locked.cols();
    if (room <= 0 || budget_used >= req.max_subspace) break;
    const Eigen::Index cap = std::min<Eigen::Index>(
        {room, static_cast<Eigen::Index>(std::max<long>(200, 4 * missing + 100)),
         static_cast<Eigen::Index>(req.max_subspace - budget_used)});

    Matrix v(n, cap);
    Matrix mv(n, cap);
    std::vector<double> alpha;
    std::vector<double> beta;

    Vector start(n);
    for (Eigen::Index i = 0; i < n; ++i) start[i] = gauss(rng);
    orth_locked(start);
    {
      const Vector ms = m.apply(start);
      start /= std::sqrt(start.dot(ms));
    }
    v.col(0) = start;
    mv.col(0) = m.apply(start);

    std::vector<RitzPair> converged;
    std::size_t prev_conv = 0;
    int stable_checks = 0;
    Eigen::Index steps = 0;
    double scale = 0.0;
    for (Eigen::Index j = 0; j < cap; ++j) {
      Vector w = apply_op(mv.col(j));
      double aj = mv.col(j).dot(w);
      w -= aj * v.col(j);
      if (j > 0) w -= beta[static_cast<std::size_t>(j - 1)] * v.col(j - 1);
      orth_locked(w);
      for (int pass = 0; pass < 2; ++pass) {
        const Vector c = mv.leftCols(j + 1).transpose() * w;
        w -= v.leftCols(j + 1) * c;
        aj += c[j];
      }
      const Vector mw = m.apply(w);
      const double bj = std::sqrt(std::max(0.0, w.dot(mw)));
      alpha.push_back(aj);
      beta.push_back(bj);
      steps = j + 1;
      scale = std::max({scale, std::abs(aj), bj});
      const bool invariant = bj <= 1e-12 * scale;
      const bool last = invariant || j + 1 == cap;
      if (!last) {
        v.col(j + 1) = w / bj;
        mv.col(j + 1) = mw / bj;
      }
      if (!last && (j + 1) % 10 != 0) continue;

      // Ritz analysis of the tridiagonal projection.
      Matrix t = Matrix::Zero(steps, steps);
      for (Eigen::Index k = 0; k < steps; ++k) {
        t(k, k) = alpha[static_cast<std::size_t>(k)];
        if (k + 1 < steps) {
          t(k + 1, k) = beta[static_cast<std::size_t>(k)];
          t(k, k + 1) = beta[static_cast<std::size_t>(k)];
        }
      }
      Eigen::SelfAdjointEigenSolver<Matrix> es(t);
      converged.clear();
      std::size_t band_ritz = 0;
      for (Eigen::Index i = 0; i < steps; ++i) {
        const double theta = es.eigenvalues()[i];
        if (std::abs(theta) < 1e-300) continue;
        const double lam = sigma + 1.0 / theta;
        if (lam > lmax) continue;
        ++band_ritz;
        const double est = bj * std::abs(es.eigenvectors()(steps - 1, i));
        if (est > 1e-4 * std::abs(theta)) continue;
        Vector x = v.leftCols(steps) * es.eigenvectors().col(i);
        const Vector mx = m.apply(x);
        const Vector ax = a.multiply(x);
        const double rq = x.dot(ax) / x.dot(mx);
        if (rq > lmax) continue;
        const double r = (ax - rq * mx).norm() / x.norm();
        if (r <= res_tol) converged.push_back({rq, std::move(x)});
      }
      const long have = static_cast<long>(locked_vals.size() + converged.size());
      stable_checks = (converged.size() == prev_conv) ? stable_checks + 1 : 0;
      prev_conv = converged.size();
      const bool all_band_done = converged.size() == band_ritz && stable_checks >= 1 && steps >= 40;
      // Hidden copies of degenerate pairs cannot outnumber this cycle's pairs.
      const bool only_hidden = missing - static_cast<long>(converged.size()) <=
                               static_cast<long>(converged.size());
      if (last || have >= target || (all_band_done && only_hidden)) break;
    }
    budget_used += static_cast<std::size_t>(steps);

    std::size_t added = 0;
    for (auto& rp : converged) {
      Vector x = rp.x;
      orth_locked(x);
      Vector mx = m.apply(x);
      const double nrm = std::sqrt(x.dot(mx));
      if (!(nrm > 1e-6 * std::sqrt(rp.x.dot(m.apply(rp.x))))) continue;
      x /= nrm;
      mx /= nrm;
      const double rq = x.dot(a.multiply(x));
      if (rq > lmax) continue;
      locked.conservativeResize(n, locked.cols() + 1);
      mlocked.conservativeResize(n, mlocked.cols() + 1);
      locked.col(locked.cols() - 1) = x;
      mlocked.col(mlocked.cols() - 1) = mx;
      locked_vals.push_back(rq);
      ++added;
    }
    stalls = added == 0 ? stalls + 1 : 0;
    if (stalls >= 3) break;
  }

  const auto found = static_cast<long>(locked_vals.size());
  if (found != target) {
    throw CompletenessError("band solver found " + std::to_string(found) +
                            " eigenpairs but the inertia count at lambda_max is " +
                            std::to_string(target));
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(found));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return locked_vals[static_cast<std::size_t>(x)] < locked_vals[static_cast<std::size_t>(y)];
  });
  sol.eigenvalues.resize(found);
  sol.eigenvectors.resize(n, found);
  for (long k = 0; k < found; ++k) {
    sol.eigenvalues[k] = locked_vals[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
    sol.eigenvectors.col(k) = locked.col(order[static_cast<std::size_t>(k)]);
  }
  sol.residuals = pair_residuals(a, m, sol.eigenvalues, sol.eigenvectors);
  if (found > 0 && sol.eigenvalues[0] < -req.tolerance * sol.norm_a) {
    std::ostringstream os;
    os.precision(17);
    os << "smallest eigenvalue " << sol.eigenvalues[0] << " is negative beyond tolerance";
    sol.warnings.push_back(os.str());
  }
  return sol;
}

} // namespace fadg
