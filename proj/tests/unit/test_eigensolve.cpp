// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "fadg/assembly.hpp"
#include "fadg/eigensolve.hpp"
#include "fadg/error.hpp"
#include "fadg/ldlt.hpp"

using namespace fadg;

namespace {

SparseSymMatrix sym(const Matrix& d) { return SparseSymMatrix(SparseMatrix(d.sparseView())); }

BlockDiagMatrix identity_blocks(int n, int block) {
  std::vector<Matrix> b(static_cast<std::size_t>(n / block), Matrix::Identity(block, block));
  return BlockDiagMatrix(b);
}

Matrix random_symmetric(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
  return 0.5 * (a + a.transpose());
}

// Sparse symmetric matrix with a banded, block-coupled pattern.
Matrix random_banded(int n, int band, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - band); j <= i; ++j) a(i, j) = a(j, i) = nd(rng);
  return a;
}

Inertia dense_inertia(const Matrix& s) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  Inertia in;
  const double tol = 1e-12 * s.cwiseAbs().rowwise().sum().maxCoeff();
  for (double v : es.eigenvalues()) {
    if (v < -tol) ++in.negative;
    else if (v > tol) ++in.positive;
    else ++in.zero;
  }
  return in;
}

struct SmallProblem {
  SparseSymMatrix a;
  BlockDiagMatrix m;
};

SmallProblem dg_problem(int nx, int ny, BasisSpec basis, Alignment al, CoefficientField alpha = CoefficientField::constant(1.0)) {
  const FieldDirection b{1.165939761, 1.0};
  const Mesh mesh = build_mesh({nx, ny, al, b});
  const auto red = build_reduced(assemble_operators(mesh, basis, alpha, {b}, 6.0));
  return {red.a, red.m};
}

} // namespace

TEST_CASE("inertia of simple matrices") {
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << -1.0, 0.0, 2.0;
  CHECK(ldl_inertia(sym(d), 1) == Inertia{1, 1, 1});
  CHECK(ldl_inertia(sym(Matrix::Identity(7, 7)), 3) == Inertia{0, 0, 7});
}

TEST_CASE("inertia of random symmetric matrices matches dense eigenvalue signs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix s = random_symmetric(40, rng);
    for (int block : {1, 4, 7, 40}) {
      CHECK(ldl_inertia(sym(s), block) == dense_inertia(s));
    }
  }
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix s = random_banded(120, 9, rng);
    CHECK(ldl_inertia(sym(s), 8) == dense_inertia(s));
  }
}

TEST_CASE("block LDLT solves indefinite systems") {
  std::mt19937_64 rng(5);
  const Matrix s = random_banded(90, 12, rng);
  const BlockLdlt f(sym(s), 10);
  Vector x = Vector::Random(90);
  const Vector rhs = s * x;
  CHECK((f.solve(rhs) - x).norm() <= 1e-8 * x.norm());
  CHECK(f.factor_entries() > 0);
}

TEST_CASE("minimum degree order is a permutation that eliminates leaves first") {
  // star graph: centre 0 with leaves 1..4
  const std::vector<std::vector<int>> adj{{1, 2, 3, 4}, {0}, {0}, {0}, {0}};
  const auto order = minimum_degree_order(adj);
  REQUIRE(order.size() == 5);
  CHECK(order.front() == 1);
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("zero pivot with remaining coupling is a breakdown") {
  Matrix s(2, 2);
  s << 0.0, 1.0, 1.0, 0.0;
  CHECK_THROWS_AS(BlockLdlt(sym(s), 1), FactorizationBreakdown);
  // with a 2x2 pivot block the same matrix is fine
  CHECK(BlockLdlt(sym(s), 2).inertia() == Inertia{1, 0, 1});
}

TEST_CASE("dense generalized eigensolver") {
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << 1, 2, 3;
  auto sol = dense_generalized_eig(a, Matrix::Identity(3, 3));
  CHECK(sol.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(sol.eigenvalues[2] == doctest::Approx(3.0));
  Matrix a2 = Matrix::Zero(2, 2);
  a2.diagonal() << 2, 8;
  Matrix m2 = Matrix::Zero(2, 2);
  m2.diagonal() << 1, 2;
  sol = dense_generalized_eig(a2, m2);
  CHECK(sol.eigenvalues[0] == doctest::Approx(2.0));
  CHECK(sol.eigenvalues[1] == doctest::Approx(4.0));

  std::mt19937_64 rng(2);
  const Matrix r = random_symmetric(50, rng);
  const Matrix spd_a = r * r.transpose();
  const Matrix q = random_symmetric(50, rng);
  const Matrix spd_m = q * q.transpose() + 50.0 * Matrix::Identity(50, 50);
  sol = dense_generalized_eig(spd_a, spd_m);
  const double na = spd_a.cwiseAbs().rowwise().sum().maxCoeff();
  for (Eigen::Index k = 0; k < 50; ++k) {
    const Vector x = sol.eigenvectors.col(k);
    CHECK((spd_a * x - sol.eigenvalues[k] * spd_m * x).norm() <= 1e-10 * na * x.norm());
  }
  const Matrix g = sol.eigenvectors.transpose() * spd_m * sol.eigenvectors;
  CHECK((g - Matrix::Identity(50, 50)).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK_THROWS_AS((void)dense_generalized_eig(a, -Matrix::Identity(3, 3)), SolverError);
}

TEST_CASE("band solver on diagonal problems") {
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << 1, 2, 3;
  BandRequest req;
  req.lambda_max = 2.5;
  auto sol = band_eig(sym(a), identity_blocks(3, 1), req);
  REQUIRE(sol.size() == 2);
  CHECK(sol.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(sol.eigenvalues[1] == doctest::Approx(2.0));
  CHECK(sol.inertia_count == 2);
  req.lambda_max = 0.5;
  sol = band_eig(sym(a), identity_blocks(3, 1), req);
  CHECK(sol.size() == 0);
  CHECK(sol.inertia_count == 0);
}

TEST_CASE("band solver input validation") {
  BandRequest req;
  req.lambda_max = -1.0;
  CHECK_THROWS_AS(req.validate(), ConfigError);
  req = BandRequest{};
  req.tolerance = 0.0;
  CHECK_THROWS_AS(req.validate(), ConfigError);
}

TEST_CASE("band solver agrees with the dense solver on DG systems") {
  const std::vector<SmallProblem> problems{
      dg_problem(2, 4, {3, 3}, Alignment::aligned_bottom_top),
      dg_problem(3, 3, {2, 4}, Alignment::cartesian),
      dg_problem(2, 6, {3, 3}, Alignment::aligned_bottom_top, CoefficientField(1.0, {{1, 1, 0.2, 0.0}})),
  };
  for (const auto& pb : problems) {
    BandRequest req;
    req.lambda_max = 1.5;
    const auto lan = band_eig(pb.a, pb.m, req);
    const auto den = band_eig_dense(pb.a, pb.m, req);
    REQUIRE(lan.size() == den.size());
    CHECK(static_cast<long>(lan.size()) == lan.inertia_count);
    CHECK(den.inertia_count == lan.inertia_count);
    const double na = pb.a.norm_inf();
    for (Eigen::Index k = 0; k < lan.eigenvalues.size(); ++k) {
      const double ref = den.eigenvalues[k];
      CHECK(std::abs(lan.eigenvalues[k] - ref) <= 1e-9 * std::max(std::abs(ref), 1e-3 * na));
      CHECK(lan.residuals[k] <= req.tolerance * lan.norm_a);
      CHECK(lan.eigenvalues[k] >= -1e-10 * na);
    }
    const Matrix g = lan.eigenvectors.transpose() * pb.m.apply(lan.eigenvectors);
    CHECK((g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("shift breakdown at an exact eigenvalue is recovered") {
  Matrix a = Matrix::Zero(4, 4);
  a.diagonal() << 0.0, 1.0, 1.0, 4.0;
  BandRequest req;
  req.lambda_max = 2.0;  // sigma = 1 hits the double eigenvalue
  const auto sol = band_eig(sym(a), identity_blocks(4, 1), req);
  REQUIRE(sol.size() == 3);
  CHECK(sol.eigenvalues[1] == doctest::Approx(1.0));
  CHECK(sol.eigenvalues[2] == doctest::Approx(1.0));
  CHECK_FALSE(sol.warnings.empty());
}

TEST_CASE("sparse containers") {
  Matrix d(3, 3);
  d << 4, 1, 0, 1, 3, -2, 0, -2, 5;
  const SparseSymMatrix s = sym(d);
  CHECK(s.lower().nonZeros() == 5);
  CHECK(s.nnz_full() == 7);
  CHECK(s.nnz_percent() == doctest::Approx(700.0 / 9.0));
  CHECK(s.norm_inf() == 7.0);
  const Vector x = Vector::LinSpaced(3, 1.0, 3.0);
  CHECK((s.multiply(x) - d * x).norm() == 0.0);
  CHECK((s.to_dense() - d).norm() == 0.0);
  std::ostringstream os;
  s.write_coordinate(os);
  CHECK(os.str().find("3 2 -2") != std::string::npos);

  const BlockDiagMatrix m({Matrix::Identity(2, 2) * 4.0, Matrix::Identity(1, 1) * 9.0});
  CHECK((m.inverse_sqrt().to_dense().diagonal() - Vector(Eigen::Vector3d(0.5, 0.5, 1.0 / 3.0))).norm() < 1e-15);
  CHECK_THROWS_AS(BlockDiagMatrix({-Matrix::Identity(2, 2)}).check_spd(), SolverError);
}
