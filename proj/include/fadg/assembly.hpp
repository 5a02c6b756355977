// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fadg/basis.hpp"
#include "fadg/fields.hpp"
#include "fadg/geometry.hpp"
#include "fadg/linalg.hpp"

namespace fadg {

/// Quadrature overrides; 0 selects default_quadrature_points(basis).
struct AssemblyOptions {
  int volume_points = 0;
  int face_points = 0;
};

/// Matrices of the mixed LDG system
///
///   [ -M_UV          A_UPsi^T - B_UPsi^T ] [U]         [0    0     ] [U]
///   [ A_UPsi - B_UPsi       B_PhiPsi     ] [Phi] = w^2 [0 M_PhiPsi ] [Phi]
///
/// `gradient` and `face` are stored with rows in the Phi/Psi space and
/// columns in the U/V space; their transposes are the A_PhiV and B_PhiV
/// blocks, so no separate storage exists for those.
struct OperatorSet {
  DofMap dofs;
  BlockDiagMatrix mass_u;
  SparseMatrix gradient;
  SparseMatrix face;
  SparseSymMatrix penalty;
  BlockDiagMatrix mass_phi;
  double eta_s = 6.0;

  [[nodiscard]] SparseMatrix gradient_phi_v() const { return gradient.transpose(); }
  [[nodiscard]] SparseMatrix face_phi_v() const { return face.transpose(); }
};

/// Per-cell Gram matrices  int_K u v dV.
[[nodiscard]] BlockDiagMatrix assemble_mass_u(const Mesh& mesh, const BasisSpec& basis,
                                              const AssemblyOptions& opts = {});

/// Per-cell weighted Gram matrices  int_K alpha phi psi dV.
[[nodiscard]] BlockDiagMatrix assemble_mass_phi(const Mesh& mesh, const BasisSpec& basis,
                                                const CoefficientField& alpha,
                                                const AssemblyOptions& opts = {});

/// Volume term  int_K u (B . grad psi) dV, entry (psi, u).
[[nodiscard]] SparseMatrix assemble_gradient(const Mesh& mesh, const BasisSpec& basis,
                                             const MagneticField& field,
                                             const AssemblyOptions& opts = {});

/// Interface term  sum_F int_F {u} B . [psi] dS, entry (psi, u).
[[nodiscard]] SparseMatrix assemble_face_terms(const Mesh& mesh, const BasisSpec& basis,
                                               const MagneticField& field,
                                               const AssemblyOptions& opts = {});

/// Penalty  sum_F int_F (eta_s / h_F) (B . [phi]) (B . [psi]) dS.
[[nodiscard]] SparseSymMatrix assemble_penalty(const Mesh& mesh, const BasisSpec& basis,
                                               const MagneticField& field, double eta_s,
                                               const AssemblyOptions& opts = {});

[[nodiscard]] OperatorSet assemble_operators(const Mesh& mesh, const BasisSpec& basis,
                                             const CoefficientField& alpha,
                                             const MagneticField& field, double eta_s,
                                             const AssemblyOptions& opts = {});

struct ReducedSystem {
  SparseSymMatrix a;
  BlockDiagMatrix m;
  double nnz_percent = 0.0;
};

/// A = (A_UPsi - B_UPsi) M_UV^{-1} (A_UPsi - B_UPsi)^T + B_PhiPsi, M = M_PhiPsi.
[[nodiscard]] ReducedSystem build_reduced(const OperatorSet& ops);

/// M^{-1/2} A M^{-1/2} with the blockwise symmetric inverse square root.
[[nodiscard]] SparseSymMatrix standard_form(const SparseSymMatrix& a, const BlockDiagMatrix& m);

/// Coefficient vector of the constant function 1.
[[nodiscard]] Vector constant_mode(const DofMap& dofs, const BasisSpec& basis);

} // namespace fadg
