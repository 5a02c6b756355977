// SPDX-License-Identifier: Apache-2.0
#include "fadg/assembly.hpp"

#include <cmath>
#include <vector>

#include "fadg/error.hpp"

namespace fadg {

namespace {

using Triplet = Eigen::Triplet<double, long>;

int volume_points(const BasisSpec& basis, const AssemblyOptions& opts) {
  return opts.volume_points > 0 ? opts.volume_points : default_quadrature_points(basis);
}

int face_points(const BasisSpec& basis, const AssemblyOptions& opts) {
  return opts.face_points > 0 ? opts.face_points : default_quadrature_points(basis);
}

// Basis values and reference gradients at the tensor Gauss points, shared by
// all cells (the reference element is the same everywhere).
struct VolumeTable {
  std::vector<double> xi;
  std::vector<double> eta;
  Vector weights;
  Matrix values;  // points x basis
  Matrix d_xi;
  Matrix d_eta;
};

VolumeTable make_volume_table(const BasisSpec& basis, int nq) {
  const QuadratureRule rule = gauss_rule(nq);
  const auto npts = static_cast<Eigen::Index>(rule.size() * rule.size());
  const int nb = basis.local_dim();
  VolumeTable t;
  t.weights.resize(npts);
  t.values.resize(npts, nb);
  t.d_xi.resize(npts, nb);
  t.d_eta.resize(npts, nb);
  Eigen::Index q = 0;
  for (std::size_t a = 0; a < rule.size(); ++a) {
    for (std::size_t b = 0; b < rule.size(); ++b, ++q) {
      t.xi.push_back(rule.nodes[a]);
      t.eta.push_back(rule.nodes[b]);
      t.weights[q] = rule.weights[a] * rule.weights[b];
      const TensorBasisValues v = tensor_basis_eval(basis, rule.nodes[a], rule.nodes[b]);
      for (int k = 0; k < nb; ++k) {
        t.values(q, k) = v.values[static_cast<std::size_t>(k)];
        t.d_xi(q, k) = v.gradients[static_cast<std::size_t>(k)][0];
        t.d_eta(q, k) = v.gradients[static_cast<std::size_t>(k)][1];
      }
    }
  }
  return t;
}

// Weighted Gram matrix of one cell with weight `coef` evaluated at the
// physical quadrature points.
Matrix cell_gram(const Cell& cell, const VolumeTable& t, const CoefficientField* coef) {
  const double det = cell.jacobian_det();
  Vector w = t.weights * det;
  if (coef != nullptr && !coef->is_constant()) {
    for (Eigen::Index q = 0; q < w.size(); ++q) {
      const Vec2 x = reference_map(cell, t.xi[static_cast<std::size_t>(q)],
                                   t.eta[static_cast<std::size_t>(q)]);
      w[q] *= (*coef)(x.x(), x.y());
    }
  } else if (coef != nullptr) {
    w *= coef->mean();
  }
  Matrix g = t.values.transpose() * w.asDiagonal() * t.values;
  return 0.5 * (g + g.transpose());
}

void append_block(std::vector<Triplet>& trip, const Matrix& block, std::size_t row0,
                  std::size_t col0) {
  for (Eigen::Index c = 0; c < block.cols(); ++c) {
    for (Eigen::Index r = 0; r < block.rows(); ++r) {
      const double v = block(r, c);
      if (v != 0.0) {
        trip.emplace_back(static_cast<long>(row0) + r, static_cast<long>(col0) + c, v);
      }
    }
  }
}

// b . n with exact zero on field-aligned edges.
double normal_flux(const FieldDirection& b, const Vec2& n) {
  const double bn = b.b1 * n.x() + b.b2 * n.y();
  return std::abs(bn) <= 1e-14 * b.vec().norm() ? 0.0 : bn;
}

// Traces of all basis functions of both sides at the quadrature points of
// one interface segment.
struct FaceSample {
  Matrix owner;     // points x basis
  Matrix neighbor;  // points x basis
  Vector weights;   // quadrature weight * physical measure
  Vector beta;      // beta at the physical points
};

FaceSample sample_face(const Mesh& mesh, const Interface& f, const BasisSpec& basis,
                       const QuadratureRule& rule, const CoefficientField& beta) {
  const auto nq = static_cast<Eigen::Index>(rule.size());
  const int nb = basis.local_dim();
  FaceSample s;
  s.owner.resize(nq, nb);
  s.neighbor.resize(nq, nb);
  s.weights.resize(nq);
  s.beta.resize(nq);
  const Cell& own = mesh.cells()[f.owner];
  for (Eigen::Index q = 0; q < nq; ++q) {
    const double t = rule.nodes[static_cast<std::size_t>(q)];
    const double lam = 0.5 * (t + 1.0);
    const double e_own = f.owner_range[0] + (f.owner_range[1] - f.owner_range[0]) * lam;
    const double e_nbr = f.neighbor_range[0] + (f.neighbor_range[1] - f.neighbor_range[0]) * lam;
    const auto [xo, yo] = edge_point(f.owner_edge, e_own);
    const auto [xn, yn] = edge_point(f.neighbor_edge, e_nbr);
    const TensorBasisValues vo = tensor_basis_eval(basis, xo, yo);
    const TensorBasisValues vn = tensor_basis_eval(basis, xn, yn);
    for (int k = 0; k < nb; ++k) {
      s.owner(q, k) = vo.values[static_cast<std::size_t>(k)];
      s.neighbor(q, k) = vn.values[static_cast<std::size_t>(k)];
    }
    s.weights[q] = rule.weights[static_cast<std::size_t>(q)] * 0.5 * f.h_f;
    const Vec2 x = reference_map(own, xo, yo);
    s.beta[q] = beta(x.x(), x.y());
  }
  return s;
}

SparseMatrix from_triplets(std::size_t n, const std::vector<Triplet>& trip) {
  SparseMatrix m(static_cast<long>(n), static_cast<long>(n));
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

} // namespace

BlockDiagMatrix assemble_mass_u(const Mesh& mesh, const BasisSpec& basis,
                                const AssemblyOptions& opts) {
  basis.validate();
  const VolumeTable t = make_volume_table(basis, volume_points(basis, opts));
  std::vector<Matrix> blocks;
  blocks.reserve(mesh.num_cells());
  for (const auto& cell : mesh.cells()) blocks.push_back(cell_gram(cell, t, nullptr));
  return BlockDiagMatrix(std::move(blocks));
}

BlockDiagMatrix assemble_mass_phi(const Mesh& mesh, const BasisSpec& basis,
                                  const CoefficientField& alpha, const AssemblyOptions& opts) {
  basis.validate();
  const VolumeTable t = make_volume_table(basis, volume_points(basis, opts));
  std::vector<Matrix> blocks;
  blocks.reserve(mesh.num_cells());
  for (const auto& cell : mesh.cells()) blocks.push_back(cell_gram(cell, t, &alpha));
  return BlockDiagMatrix(std::move(blocks));
}

SparseMatrix assemble_gradient(const Mesh& mesh, const BasisSpec& basis,
                               const MagneticField& field, const AssemblyOptions& opts) {
  basis.validate();
  const VolumeTable t = make_volume_table(basis, volume_points(basis, opts));
  const int nb = basis.local_dim();
  const DofMap dofs(mesh.num_cells(), nb);
  std::vector<Triplet> trip;
  trip.reserve(mesh.num_cells() * static_cast<std::size_t>(nb * nb));
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const Cell& cell = mesh.cells()[k];
    // B . grad psi = beta (J^{-1} b) . grad_ref psi
    const Vec2 vb = cell.jacobian().inverse() * field.b.vec();
    const Matrix directional = vb.x() * t.d_xi + vb.y() * t.d_eta;
    Vector w = t.weights * cell.jacobian_det();
    for (Eigen::Index q = 0; q < w.size(); ++q) {
      const Vec2 x = reference_map(cell, t.xi[static_cast<std::size_t>(q)],
                                   t.eta[static_cast<std::size_t>(q)]);
      w[q] *= field.beta(x.x(), x.y());
    }
    const Matrix block = directional.transpose() * w.asDiagonal() * t.values;
    append_block(trip, block, dofs.offset(k), dofs.offset(k));
  }
  return from_triplets(dofs.size(), trip);
}

SparseMatrix assemble_face_terms(const Mesh& mesh, const BasisSpec& basis,
                                 const MagneticField& field, const AssemblyOptions& opts) {
  basis.validate();
  const QuadratureRule rule = gauss_rule(face_points(basis, opts));
  const int nb = basis.local_dim();
  const DofMap dofs(mesh.num_cells(), nb);
  std::vector<Triplet> trip;
  for (const auto& f : mesh.interfaces()) {
    const double bn = normal_flux(field.b, f.normal);
    if (bn == 0.0) continue;
    const FaceSample s = sample_face(mesh, f, basis, rule, field.beta);
    // {u} B.[psi] = 1/2 (u_K + u_N) beta (b.n) (psi_K - psi_N)
    const Vector w = (0.5 * bn) * s.weights.cwiseProduct(s.beta);
    const Matrix wo = w.asDiagonal() * s.owner;
    const Matrix wn = w.asDiagonal() * s.neighbor;
    const std::size_t ok = dofs.offset(f.owner);
    const std::size_t nk = dofs.offset(f.neighbor);
    append_block(trip, wo.transpose() * s.owner, ok, ok);
    append_block(trip, wo.transpose() * s.neighbor, ok, nk);
    append_block(trip, -(wn.transpose() * s.owner), nk, ok);
    append_block(trip, -(wn.transpose() * s.neighbor), nk, nk);
  }
  return from_triplets(dofs.size(), trip);
}

SparseSymMatrix assemble_penalty(const Mesh& mesh, const BasisSpec& basis,
                                 const MagneticField& field, double eta_s,
                                 const AssemblyOptions& opts) {
  basis.validate();
  if (!(eta_s >= 0.0)) throw ConfigError("penalty parameter eta_S must be >= 0");
  const int nb = basis.local_dim();
  const DofMap dofs(mesh.num_cells(), nb);
  if (eta_s == 0.0) return SparseSymMatrix(SparseMatrix(static_cast<long>(dofs.size()),
                                                        static_cast<long>(dofs.size())));
  const QuadratureRule rule = gauss_rule(face_points(basis, opts));
  std::vector<Triplet> trip;
  for (const auto& f : mesh.interfaces()) {
    const double bn = normal_flux(field.b, f.normal);
    if (bn == 0.0) continue;
    const FaceSample s = sample_face(mesh, f, basis, rule, field.beta);
    // (eta/h) (B.[phi]) (B.[psi]) = (eta/h) beta^2 (b.n)^2 (phi_K - phi_N)(psi_K - psi_N)
    const Vector w = (eta_s / f.h_f * bn * bn) * s.weights.cwiseProduct(s.beta.cwiseAbs2());
    const Matrix jump = [&] {
      Matrix j(s.owner.rows(), 2 * nb);
      j << s.owner, -s.neighbor;
      return j;
    }();
    const Matrix local = jump.transpose() * w.asDiagonal() * jump;
    const std::size_t ok = dofs.offset(f.owner);
    const std::size_t nk = dofs.offset(f.neighbor);
    append_block(trip, local.topLeftCorner(nb, nb), ok, ok);
    append_block(trip, local.topRightCorner(nb, nb), ok, nk);
    append_block(trip, local.bottomLeftCorner(nb, nb), nk, ok);
    append_block(trip, local.bottomRightCorner(nb, nb), nk, nk);
  }
  return SparseSymMatrix(from_triplets(dofs.size(), trip));
}

OperatorSet assemble_operators(const Mesh& mesh, const BasisSpec& basis,
                               const CoefficientField& alpha, const MagneticField& field,
                               double eta_s, const AssemblyOptions& opts) {
  OperatorSet ops;
  ops.dofs = DofMap(mesh.num_cells(), basis.local_dim());
  ops.mass_u = assemble_mass_u(mesh, basis, opts);
  ops.gradient = assemble_gradient(mesh, basis, field, opts);
  ops.face = assemble_face_terms(mesh, basis, field, opts);
  ops.penalty = assemble_penalty(mesh, basis, field, eta_s, opts);
  ops.mass_phi = assemble_mass_phi(mesh, basis, alpha, opts);
  ops.eta_s = eta_s;
  return ops;
}

ReducedSystem build_reduced(const OperatorSet& ops) {
  const SparseMatrix g = ops.gradient - ops.face;
  const SparseMatrix m_inv = ops.mass_u.inverse().to_sparse();
  const SparseMatrix gm = g * m_inv;
  SparseMatrix a = (gm * SparseMatrix(g.transpose())).pruned();
  a += ops.penalty.full();
  ReducedSystem out;
  out.a = SparseSymMatrix(a, 1e-15);
  out.m = ops.mass_phi;
  out.m.check_spd();
  out.nnz_percent = out.a.nnz_percent();
  return out;
}

SparseSymMatrix standard_form(const SparseSymMatrix& a, const BlockDiagMatrix& m) {
  const SparseMatrix d = m.inverse_sqrt().to_sparse();
  const SparseMatrix s = d * a.full() * d;
  return SparseSymMatrix(s);
}

Vector constant_mode(const DofMap& dofs, const BasisSpec& basis) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dofs.size()));
  const auto k0 = static_cast<std::size_t>(basis.index(0, 0));
  for (std::size_t c = 0; c < dofs.num_cells(); ++c) {
    v[static_cast<Eigen::Index>(dofs.offset(c) + k0)] = 1.0;
  }
  return v;
}

} // namespace fadg
