// SPDX-License-Identifier: Apache-2.0
#include "fadg/ldlt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include <lapacke.h>

#include "fadg/error.hpp"

namespace fadg {

std::vector<int> minimum_degree_order(const std::vector<std::vector<int>>& adj) {
  const auto n = static_cast<int>(adj.size());
  std::vector<std::set<int>> graph(adj.size());
  for (int v = 0; v < n; ++v) {
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (w != v) {
        graph[static_cast<std::size_t>(v)].insert(w);
        graph[static_cast<std::size_t>(w)].insert(v);
      }
    }
  }
  std::vector<char> done(adj.size(), 0);
  std::vector<int> order;
  order.reserve(adj.size());
  for (int step = 0; step < n; ++step) {
    int best = -1;
    std::size_t best_deg = std::numeric_limits<std::size_t>::max();
    for (int v = 0; v < n; ++v) {
      if (!done[static_cast<std::size_t>(v)] && graph[static_cast<std::size_t>(v)].size() < best_deg) {
        best = v;
        best_deg = graph[static_cast<std::size_t>(v)].size();
      }
    }
    done[static_cast<std::size_t>(best)] = 1;
    order.push_back(best);
    const std::vector<int> nbrs(graph[static_cast<std::size_t>(best)].begin(),
                                graph[static_cast<std::size_t>(best)].end());
    for (int u : nbrs) {
      auto& gu = graph[static_cast<std::size_t>(u)];
      gu.erase(best);
      for (int w : nbrs) {
        if (w != u) gu.insert(w);
      }
    }
    graph[static_cast<std::size_t>(best)].clear();
  }
  return order;
}

namespace {

std::vector<int> uniform_blocks(std::size_t n, int block_size) {
  if (block_size < 1) throw SolverError("block size must be >= 1");
  std::vector<int> sizes;
  for (std::size_t o = 0; o < n; o += static_cast<std::size_t>(block_size)) {
    sizes.push_back(static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(block_size), n - o)));
  }
  return sizes;
}

// Inertia of the D factor produced by dsytrf ('L').
Inertia pivot_inertia(const Matrix& lu, const std::vector<int>& ipiv, double tol) {
  Inertia in;
  auto classify = [&](double d) {
    if (d > tol) ++in.positive;
    else if (d < -tol) ++in.negative;
    else ++in.zero;
  };
  const auto n = static_cast<int>(lu.rows());
  int k = 0;
  while (k < n) {
    if (ipiv[static_cast<std::size_t>(k)] > 0) {
      classify(lu(k, k));
      k += 1;
    } else {
      const double a = lu(k, k);
      const double b = lu(k + 1, k);
      const double c = lu(k + 1, k + 1);
      const double mid = 0.5 * (a + c);
      const double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
      classify(mid + rad);
      classify(mid - rad);
      k += 2;
    }
  }
  return in;
}

} // namespace

BlockLdlt::BlockLdlt(const SparseSymMatrix& s, const std::vector<int>& block_sizes,
                     double zero_tol) {
  factor(s, block_sizes, zero_tol);
}

BlockLdlt::BlockLdlt(const SparseSymMatrix& s, int block_size, double zero_tol) {
  factor(s, uniform_blocks(s.size(), block_size), zero_tol);
}

void BlockLdlt::factor(const SparseSymMatrix& s, const std::vector<int>& block_sizes,
                       double zero_tol) {
  n_ = s.size();
  sizes_ = block_sizes;
  const std::size_t nblk = sizes_.size();
  offsets_.assign(nblk + 1, 0);
  for (std::size_t b = 0; b < nblk; ++b) offsets_[b + 1] = offsets_[b] + static_cast<std::size_t>(sizes_[b]);
  if (offsets_[nblk] != n_) throw SolverError("block partition does not match matrix size");

  std::vector<int> block_of(n_);
  for (std::size_t b = 0; b < nblk; ++b) {
    std::fill(block_of.begin() + static_cast<long>(offsets_[b]),
              block_of.begin() + static_cast<long>(offsets_[b + 1]), static_cast<int>(b));
  }

  // Block graph and ordering.
  const SparseMatrix& low = s.lower();
  std::vector<std::vector<int>> adj(nblk);
  for (long c = 0; c < low.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(low, c); it; ++it) {
      const int br = block_of[static_cast<std::size_t>(it.row())];
      const int bc = block_of[static_cast<std::size_t>(it.col())];
      if (br != bc && it.value() != 0.0) adj[static_cast<std::size_t>(bc)].push_back(br);
    }
  }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  order_ = minimum_degree_order(adj);
  std::vector<int> pos(nblk);
  for (std::size_t p = 0; p < nblk; ++p) pos[static_cast<std::size_t>(order_[p])] = static_cast<int>(p);

  // Scatter entries into blocks indexed by elimination position.
  std::vector<Matrix> diag(nblk);
  for (std::size_t p = 0; p < nblk; ++p) {
    const int sz = sizes_[static_cast<std::size_t>(order_[p])];
    diag[p] = Matrix::Zero(sz, sz);
  }
  lower_.assign(nblk, {});
  for (long c = 0; c < low.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(low, c); it; ++it) {
      const auto r = static_cast<std::size_t>(it.row());
      const auto cc = static_cast<std::size_t>(it.col());
      const int br = block_of[r];
      const int bc = block_of[cc];
      const auto lr = static_cast<Eigen::Index>(r - offsets_[static_cast<std::size_t>(br)]);
      const auto lc = static_cast<Eigen::Index>(cc - offsets_[static_cast<std::size_t>(bc)]);
      if (br == bc) {
        Matrix& d = diag[static_cast<std::size_t>(pos[static_cast<std::size_t>(br)])];
        d(lr, lc) = it.value();
        d(lc, lr) = it.value();
        continue;
      }
      int pr = pos[static_cast<std::size_t>(br)];
      int pc = pos[static_cast<std::size_t>(bc)];
      Eigen::Index rr = lr;
      Eigen::Index rc = lc;
      if (pr < pc) {
        std::swap(pr, pc);
        std::swap(rr, rc);
      }
      auto [iter, inserted] = lower_[static_cast<std::size_t>(pc)].try_emplace(pr);
      if (inserted) {
        iter->second = Matrix::Zero(sizes_[static_cast<std::size_t>(order_[static_cast<std::size_t>(pr)])],
                                    sizes_[static_cast<std::size_t>(order_[static_cast<std::size_t>(pc)])]);
      }
      iter->second(rr, rc) = it.value();
    }
  }

  const double tol = zero_tol * s.norm_inf();
  pivots_.assign(nblk, {});
  inertia_ = {};
  for (std::size_t k = 0; k < nblk; ++k) {
    Pivot& pv = pivots_[k];
    pv.lu = std::move(diag[k]);
    const auto m = static_cast<lapack_int>(pv.lu.rows());
    std::vector<lapack_int> ipiv(static_cast<std::size_t>(m));
    const lapack_int info =
        m > 0 ? LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', m, pv.lu.data(), m, ipiv.data()) : 0;
    if (info < 0) throw SolverError("dsytrf argument error");
    pv.ipiv.assign(ipiv.begin(), ipiv.end());
    const Inertia local = pivot_inertia(pv.lu, pv.ipiv, tol);
    inertia_.negative += local.negative;
    inertia_.zero += local.zero;
    inertia_.positive += local.positive;

    auto& col = lower_[k];
    if (col.empty()) continue;
    if (local.zero > 0) {
      throw FactorizationBreakdown("zero pivot in coupled block at elimination step " +
                                   std::to_string(k));
    }

    // X_i = D_k^{-1} C_ik^T for all coupled blocks i.
    std::vector<std::pair<int, Matrix>> xs;
    xs.reserve(col.size());
    for (auto& [i, c_ik] : col) {
      Matrix x = c_ik.transpose();
      pivot_solve(k, x);
      xs.emplace_back(i, std::move(x));
    }
    // Schur complement update of the trailing blocks.
    std::size_t a = 0;
    for (auto it_i = col.begin(); it_i != col.end(); ++it_i, ++a) {
      const int i = it_i->first;
      const Matrix& x_i = xs[a].second;
      Matrix& d_i = diag[static_cast<std::size_t>(i)];
      d_i.noalias() -= it_i->second * x_i;
      d_i = (0.5 * (d_i + d_i.transpose())).eval();
      auto it_j = it_i;
      for (++it_j; it_j != col.end(); ++it_j) {
        const int j = it_j->first;
        auto [target, inserted] = lower_[static_cast<std::size_t>(i)].try_emplace(j);
        if (inserted) target->second = Matrix::Zero(it_j->second.rows(), x_i.cols());
        target->second.noalias() -= it_j->second * x_i;
      }
    }
    // Replace C_ik with L_ik = X_i^T.
    a = 0;
    for (auto& [i, c_ik] : col) {
      c_ik = xs[a++].second.transpose();
    }
  }
}

void BlockLdlt::pivot_solve(std::size_t k, Matrix& rhs) const {
  const Pivot& pv = pivots_[k];
  const auto m = static_cast<lapack_int>(pv.lu.rows());
  if (m == 0 || rhs.cols() == 0) return;
  std::vector<lapack_int> ipiv(pv.ipiv.begin(), pv.ipiv.end());
  const lapack_int info =
      LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', m, static_cast<lapack_int>(rhs.cols()),
                     pv.lu.data(), m, ipiv.data(), rhs.data(), static_cast<lapack_int>(rhs.rows()));
  if (info != 0) throw SolverError("dsytrs failed");
}

Matrix BlockLdlt::solve(const Matrix& b) const {
  if (singular()) throw SolverError("cannot solve with a singular LDL^T factorization");
  const std::size_t nblk = order_.size();
  std::vector<Matrix> y(nblk);
  for (std::size_t p = 0; p < nblk; ++p) {
    const auto blk = static_cast<std::size_t>(order_[p]);
    y[p] = b.middleRows(static_cast<Eigen::Index>(offsets_[blk]), sizes_[blk]);
  }
  for (std::size_t k = 0; k < nblk; ++k) {
    for (const auto& [i, l_ik] : lower_[k]) y[static_cast<std::size_t>(i)].noalias() -= l_ik * y[k];
  }
  for (std::size_t k = 0; k < nblk; ++k) pivot_solve(k, y[k]);
  for (std::size_t k = nblk; k-- > 0;) {
    for (const auto& [i, l_ik] : lower_[k]) y[k].noalias() -= l_ik.transpose() * y[static_cast<std::size_t>(i)];
  }
  Matrix x(b.rows(), b.cols());
  for (std::size_t p = 0; p < nblk; ++p) {
    const auto blk = static_cast<std::size_t>(order_[p]);
    x.middleRows(static_cast<Eigen::Index>(offsets_[blk]), sizes_[blk]) = y[p];
  }
  return x;
}

Vector BlockLdlt::solve(const Vector& b) const {
  Matrix bm = b;
  return solve(bm).col(0);
}

long BlockLdlt::factor_entries() const {
  long n = 0;
  for (std::size_t k = 0; k < pivots_.size(); ++k) {
    n += static_cast<long>(pivots_[k].lu.size());
    for (const auto& [i, l] : lower_[k]) n += static_cast<long>(l.size());
  }
  return n;
}

} // namespace fadg
