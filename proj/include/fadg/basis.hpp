// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

namespace fadg {

/// Tensor-product Legendre basis of degree p_xi along the field (xi) and
/// p_eta across it (eta).
struct BasisSpec {
  int p_xi = 7;
  int p_eta = 7;

  void validate() const;
  [[nodiscard]] int local_dim() const { return (p_xi + 1) * (p_eta + 1); }
  /// Lexicographic local index of P_a(xi) P_b(eta).
  [[nodiscard]] int index(int a, int b) const { return a * (p_eta + 1) + b; }
  [[nodiscard]] int max_degree() const { return p_xi > p_eta ? p_xi : p_eta; }
};

struct LegendreValues {
  std::vector<double> values;
  std::vector<double> derivatives;
};

/// P_0..P_p and their derivatives at t via the three-term recurrence.
[[nodiscard]] LegendreValues legendre_basis_eval(int p, double t);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1].
[[nodiscard]] QuadratureRule gauss_rule(int n);

struct TensorBasisValues {
  std::vector<double> values;
  /// Gradients with respect to (xi, eta).
  std::vector<std::array<double, 2>> gradients;
};

[[nodiscard]] TensorBasisValues tensor_basis_eval(const BasisSpec& spec, double xi, double eta);

/// Default point count per direction for volume and interface quadrature.
[[nodiscard]] inline int default_quadrature_points(const BasisSpec& spec) {
  return spec.max_degree() + 3;
}

} // namespace fadg
