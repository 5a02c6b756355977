// SPDX-License-Identifier: Apache-2.0
#include "fadg/basis.hpp"

#include <cmath>
#include <numbers>

#include "fadg/error.hpp"

namespace fadg {

void BasisSpec::validate() const {
  if (p_xi < 0 || p_eta < 0) throw ConfigError("polynomial degrees must be >= 0");
}

LegendreValues legendre_basis_eval(int p, double t) {
  LegendreValues out;
  out.values.assign(static_cast<std::size_t>(p) + 1, 0.0);
  out.derivatives.assign(static_cast<std::size_t>(p) + 1, 0.0);
  out.values[0] = 1.0;
  if (p == 0) return out;
  out.values[1] = t;
  out.derivatives[1] = 1.0;
  for (int k = 1; k < p; ++k) {
    // (k+1) P_{k+1} = (2k+1) t P_k - k P_{k-1}
    out.values[k + 1] = ((2.0 * k + 1.0) * t * out.values[k] - k * out.values[k - 1]) / (k + 1.0);
    // P'_{k+1} = P'_{k-1} + (2k+1) P_k
    out.derivatives[k + 1] = out.derivatives[k - 1] + (2.0 * k + 1.0) * out.values[k];
  }
  return out;
}

QuadratureRule gauss_rule(int n) {
  if (n < 1) throw ConfigError("Gauss rule needs at least one point");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pn1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        converged = true;
        break;
      }
    }
    if (!converged) throw SolverError("Gauss-Legendre root iteration did not converge");
    // Recompute the derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 1; k < n; ++k) {
      const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
      p0 = p1;
      p1 = p2;
    }
    const double pn = n == 1 ? x : p1;
    const double pn1 = n == 1 ? 1.0 : p0;
    dp = n * (x * pn - pn1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

TensorBasisValues tensor_basis_eval(const BasisSpec& spec, double xi, double eta) {
  const LegendreValues lx = legendre_basis_eval(spec.p_xi, xi);
  const LegendreValues ly = legendre_basis_eval(spec.p_eta, eta);
  TensorBasisValues out;
  out.values.resize(static_cast<std::size_t>(spec.local_dim()));
  out.gradients.resize(out.values.size());
  for (int a = 0; a <= spec.p_xi; ++a) {
    for (int b = 0; b <= spec.p_eta; ++b) {
      const auto k = static_cast<std::size_t>(spec.index(a, b));
      out.values[k] = lx.values[a] * ly.values[b];
      out.gradients[k] = {lx.derivatives[a] * ly.values[b], lx.values[a] * ly.derivatives[b]};
    }
  }
  return out;
}

} // namespace fadg
