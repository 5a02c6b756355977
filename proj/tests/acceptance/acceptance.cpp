// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status counts failing criteria that are not listed in kKnownFailures.
// A known failure still prints FAIL; it is listed there because the
// discretization genuinely misses the target, as documented in the README.
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "brute_force.hpp"
#include "fadg/assembly.hpp"
#include "fadg/config.hpp"
#include "fadg/error.hpp"
#include "fadg/pipeline.hpp"
#include "fadg/spectrum.hpp"

using namespace fadg;

namespace {

const std::set<int> kKnownFailures{2};

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Inertia checks of every solve made by the suite, consumed by criterion 9.
std::vector<std::pair<std::string, bool>> g_inertia;

RunConfig config_file(const std::string& name) {
  return load_config(std::string(FADG_CONFIG_DIR) + "/" + name);
}

SolveOutput solve(const RunConfig& cfg, const std::string& label) {
  SolveOutput out = run_solve(cfg);
  std::ostringstream os;
  os << label << " " << out.solution.inertia_count << "/" << out.solution.size();
  g_inertia.emplace_back(os.str(), out.solution.inertia_count == static_cast<long>(out.solution.size()));
  return out;
}

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

Outcome exactness_anchor() {
  const auto spec = exact_spectrum({1.165939761, 1.0}, 20, 20);
  const double v = spec.at({4, -5});
  const bool pass = fmt(v, 8) == "0.11305798";
  return {pass, "omega2(4,-5) = " + fmt(v, 10)};
}

Outcome band_completeness() {
  RunConfig cfg = config_file("reference.cfg");
  cfg.solver = SolverKind::dense;
  const auto dense = solve(cfg, "reference dense");
  cfg.solver = SolverKind::lanczos;
  const auto lanczos = solve(cfg, "reference lanczos");
  const long expected = *dense.analytic_count;
  const auto count = [&](const SolveOutput& o) {
    return static_cast<long>((o.solution.eigenvalues.array() <= cfg.omega_max_sq).count());
  };
  const long nd = count(dense);
  const long nl = count(lanczos);
  std::string missing;
  std::set<ModeIndex> found;
  for (const auto& a : dense.assoc) {
    if (a.mode && a.omega2 <= cfg.omega_max_sq) found.insert(*a.mode);
  }
  for (const auto& [mode, w2] : exact_spectrum(cfg.direction(), cfg.m_max, cfg.n_max).band(cfg.omega_max_sq)) {
    if (!found.count(mode)) missing += " (" + std::to_string(mode.m) + "," + std::to_string(mode.n) + ")";
  }
  return {nd == expected && nl == expected,
          "analytic " + std::to_string(expected) + ", dense " + std::to_string(nd) + ", lanczos " +
              std::to_string(nl) + (missing.empty() ? "" : "; unresolved modes" + missing)};
}

Outcome alignment_improvement() {
  RunConfig cfg = config_file("reference.cfg");
  cfg.solver = SolverKind::dense;
  cfg.search_omega_max_sq = 3.0;
  cfg.compare_alignment = "cartesian";
  const auto res = compare_runs(cfg, cfg.compare_partner());
  const auto keep = [](const CompareRow& r) { return r.mode.max_abs() >= 10; };
  const auto med = median_improvement(res, keep);
  const long n = std::count_if(res.rows.begin(), res.rows.end(), keep);
  if (!med) return {false, "no band mode with max(|m|,|n|) >= 10 resolved by both layouts"};
  return {*med >= 1.0, "DoF " + std::to_string(res.dof) + ", median " + fmt(*med) + " decades over " +
                           std::to_string(n) + " modes"};
}

Outcome resolution_redistribution() {
  RunConfig cfg = config_file("reference.cfg");
  cfg.nx = 4;
  cfg.ny = 16;
  cfg.compare_alignment = "aligned_bottom_top";
  cfg.compare_nx = 8;
  cfg.compare_ny = 8;
  const auto res = compare_runs(cfg, cfg.compare_partner());
  const auto keep = [](const CompareRow& r) { return r.mode.max_abs() > 4; };
  const auto med = median_improvement(res, keep);
  const long n = std::count_if(res.rows.begin(), res.rows.end(), keep);
  if (!med) return {false, "no band mode with mode number > 4"};
  return {*med >= 2.5, "4x16 vs 8x8 at DoF " + std::to_string(res.dof) + ", median " + fmt(*med) +
                           " decades over " + std::to_string(n) + " modes"};
}

Outcome convergence() {
  RunConfig cfg = config_file("reference.cfg");
  const RunConfig levels = config_file("convergence.cfg");
  cfg.p_xi = levels.p_xi;
  cfg.p_eta = levels.p_eta;
  cfg.levels = levels.levels;
  const auto res = convergence_study(cfg);
  std::string errs;
  for (const auto& r : res.rows) errs += " " + fmt(r.max_band_error);
  const double lo = cfg.p_eta - 1.0;
  const double hi = cfg.p_eta + 1.5;
  return {res.fitted_slope >= lo && res.fitted_slope <= hi,
          "slope " + fmt(res.fitted_slope, 4) + " in [" + fmt(lo) + ", " + fmt(hi) + "], errors" + errs +
              ", tracked modes " + std::to_string(res.tracked.size())};
}

Outcome symmetry_psd() {
  const FieldDirection ref{1.165939761, 1.0};
  const CoefficientField one = CoefficientField::constant(1.0);
  const RunConfig var = config_file("variable.cfg");
  struct Case {
    MeshConfig mesh;
    BasisSpec basis;
    CoefficientField alpha;
    CoefficientField beta;
  };
  const std::vector<Case> cases{
      {{4, 4, Alignment::aligned_bottom_top, ref}, {3, 3}, one, one},
      {{4, 4, Alignment::cartesian, ref}, {3, 3}, one, one},
      {{2, 8, Alignment::aligned_bottom_top, ref}, {3, 3}, one, one},
      {{3, 5, Alignment::aligned_left_right, {2.0, 7.0}}, {2, 3}, one, one},
      {{2, 8, Alignment::aligned_bottom_top, var.direction()}, {3, 7}, var.alpha(), var.beta()},
      {{3, 3, Alignment::cartesian, var.direction()}, {3, 3}, var.alpha(), var.beta()},
      {{8, 32, Alignment::aligned_bottom_top, var.direction()}, {3, 7}, var.alpha(), var.beta()},
  };
  double worst_sym = 0.0;
  double worst_min = 0.0;
  double worst_kernel = 0.0;
  for (const auto& c : cases) {
    const Mesh mesh = build_mesh(c.mesh);
    const auto ops = assemble_operators(mesh, c.basis, c.alpha, {c.mesh.b, c.beta}, 6.0);
    const auto red = build_reduced(ops);
    const SparseMatrix full = red.a.full();
    worst_sym = std::max(worst_sym, SparseMatrix(full - SparseMatrix(full.transpose())).norm());
    const Vector ones = constant_mode(ops.dofs, c.basis);
    worst_kernel = std::max(worst_kernel, red.a.multiply(ones).norm() / (red.a.norm_inf() * ones.norm()));
    if (red.a.size() <= 2048) {
      const Eigen::SelfAdjointEigenSolver<Matrix> es(red.a.to_dense(), Eigen::EigenvaluesOnly);
      worst_min = std::min(worst_min, es.eigenvalues().minCoeff() / red.a.norm_inf());
    }
  }
  return {worst_sym == 0.0 && worst_min >= -1e-10 && worst_kernel <= 1e-10,
          std::to_string(cases.size()) + " meshes: |A-A^T| " + fmt(worst_sym) + ", min eig/|A| " +
              fmt(worst_min) + ", |A 1|/(|A||1|) " + fmt(worst_kernel)};
}

double rel_diff(const Matrix& a, const Matrix& b, double floor = 0.0) {
  const double scale = std::max({b.cwiseAbs().maxCoeff(), a.cwiseAbs().maxCoeff(), floor, 1e-300});
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

Outcome oracle_equivalence() {
  const FieldDirection ref{1.165939761, 1.0};
  const CoefficientField one = CoefficientField::constant(1.0);
  const CoefficientField alpha_h(1.0, {{1, 0, 0.3, 0.0}});
  const CoefficientField beta_h(1.0, {{1, -1, 0.0, 0.2}});
  const std::vector<MeshConfig> meshes{
      {2, 2, Alignment::aligned_bottom_top, {1.0, 2.0}},  // conforming
      {1, 4, Alignment::aligned_bottom_top, {1.0, 1.0}},  // conforming
      {2, 2, Alignment::aligned_bottom_top, ref},         // non-conforming
      {2, 1, Alignment::aligned_left_right, {2.0, 7.0}},  // non-conforming
      {1, 4, Alignment::aligned_left_right, {0.899515, 1.0}},
      {2, 2, Alignment::cartesian, ref},
      {4, 1, Alignment::cartesian, {0.5, 1.0}},
  };
  const int points = 14;
  double worst_assembled = 0.0;
  double worst_reduced = 0.0;
  int runs = 0;
  for (const auto& mc : meshes) {
    const Mesh mesh = build_mesh(mc);
    // Operators that vanish in exact arithmetic are measured against their natural scale.
    const auto sc = oracle::natural_scales(mesh, mc.b, 6.0);
    for (int p_xi = 0; p_xi <= 2; ++p_xi) {
      for (int p_eta = 0; p_eta <= 2; ++p_eta) {
        for (int harmonic = 0; harmonic < 2; ++harmonic) {
          const BasisSpec basis{p_xi, p_eta};
          const CoefficientField& alpha = harmonic ? alpha_h : one;
          const CoefficientField& beta = harmonic ? beta_h : one;
          const auto ops = assemble_operators(mesh, basis, alpha, {mc.b, beta}, 6.0, {points, points});
          oracle::Problem pb;
          pb.mesh = &mesh;
          pb.p_xi = p_xi;
          pb.p_eta = p_eta;
          pb.b = mc.b;
          pb.alpha = [&](double x, double y) { return alpha(x, y); };
          pb.beta = [&](double x, double y) { return beta(x, y); };
          pb.points = points;
          const auto o = oracle::assemble(pb);
          worst_assembled = std::max({worst_assembled, rel_diff(ops.mass_u.to_dense(), o.mass_u, sc.mass),
                                      rel_diff(ops.mass_phi.to_dense(), o.mass_phi, sc.mass),
                                      rel_diff(Matrix(ops.gradient), o.gradient, sc.gradient),
                                      rel_diff(Matrix(ops.face), o.face, sc.face),
                                      rel_diff(ops.penalty.to_dense(), o.penalty, sc.penalty)});
          worst_reduced =
              std::max(worst_reduced, rel_diff(build_reduced(ops).a.to_dense(), o.reduced, sc.reduced));
          ++runs;
        }
      }
    }
  }
  return {worst_assembled <= 1e-12 && worst_reduced <= 1e-12,
          std::to_string(runs) + " runs: assembled " + fmt(worst_assembled) + ", reduced " + fmt(worst_reduced)};
}

// Eigenvalues per associated mode, ascending.
std::map<ModeIndex, std::vector<double>> by_mode(const AssociatedSpectrum& assoc) {
  std::map<ModeIndex, std::vector<double>> out;
  for (const auto& a : assoc) {
    if (a.mode) out[*a.mode].push_back(a.omega2);
  }
  for (auto& [mode, v] : out) std::sort(v.begin(), v.end());
  return out;
}

Outcome variable_self_convergence() {
  RunConfig coarse = config_file("variable.cfg");
  RunConfig fine = coarse;
  fine.nx *= 2;
  fine.ny *= 2;
  const auto a = by_mode(solve(coarse, "variable coarse").assoc);
  const auto b = by_mode(solve(fine, "variable fine").assoc);
  double worst = 0.0;
  int compared = 0;
  std::string problems;
  for (const auto& [mode, fine_vals] : b) {
    if (mode.max_abs() > 6) continue;
    const auto it = a.find(mode);
    if (it == a.end() || it->second.size() != fine_vals.size()) {
      problems += " (" + std::to_string(mode.m) + "," + std::to_string(mode.n) + ")";
      continue;
    }
    for (std::size_t k = 0; k < fine_vals.size(); ++k) {
      const double d = std::abs(it->second[k] - fine_vals[k]);
      // The zero eigenvalue is compared absolutely.
      worst = std::max(worst, std::abs(fine_vals[k]) > 1e-10 ? d / std::abs(fine_vals[k]) : d);
      ++compared;
    }
  }
  return {compared > 0 && problems.empty() && worst <= 1e-6,
          std::to_string(compared) + " eigenvalues, worst relative difference " + fmt(worst) +
              (problems.empty() ? "" : "; unmatched modes" + problems)};
}

Outcome inertia() {
  {
    RunConfig cfg = config_file("reference.cfg");
    cfg.alignment = "cartesian";
    (void)solve(cfg, "reference cartesian");
    cfg = config_file("variable.cfg");
    cfg.nx = 4;
    cfg.ny = 16;
    cfg.solver = SolverKind::dense;
    (void)solve(cfg, "variable dense");
  }
  bool pass = !g_inertia.empty();
  std::string detail;
  for (const auto& [label, ok] : g_inertia) {
    pass = pass && ok;
    detail += (detail.empty() ? "" : ", ") + label;
  }
  return {pass, detail};
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"exact spectrum anchor", exactness_anchor},
      {"band completeness", band_completeness},
      {"alignment improvement", alignment_improvement},
      {"resolution redistribution", resolution_redistribution},
      {"convergence slope", convergence},
      {"symmetry and positive semidefiniteness", symmetry_psd},
      {"oracle equivalence", oracle_equivalence},
      {"variable-coefficient self-convergence", variable_self_convergence},
      {"inertia equals eigenvalue count", inertia},
  };
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool known = kKnownFailures.count(id) > 0;
    std::cout << "CRITERION " << id << " " << (o.pass ? "PASS" : "FAIL") << ": " << criteria[i].first << ": "
              << o.detail << " [" << fmt(secs) << " s]" << (!o.pass && known ? " (known failure)" : "")
              << std::endl;
    if (!o.pass && !known) ++unexpected;
  }
  return unexpected;
}
