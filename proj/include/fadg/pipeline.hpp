// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "fadg/assembly.hpp"
#include "fadg/config.hpp"
#include "fadg/eigensolve.hpp"
#include "fadg/spectrum.hpp"

namespace fadg {

struct SolveOutput {
  std::size_t dof = 0;
  double nnz_percent = 0.0;
  EigenSolution solution;
  AssociatedSpectrum assoc;
  bool constant_coefficients = false;
  /// Analytic band count over |m| <= m_max, |n| <= n_max (constant
  /// coefficients only).
  std::optional<long> analytic_count;
  std::optional<BandErrorReport> band;
};

/// geometry -> assembly -> band solve -> association. Progress lines go to
/// `log` when given.
[[nodiscard]] SolveOutput run_solve(const RunConfig& cfg, std::ostream* log = nullptr);

struct ConvergenceRow {
  int level = 0;
  int nx = 0;
  int ny = 0;
  std::size_t dof = 0;
  /// Max error over the tracked modes.
  double max_band_error = 0.0;
  /// Max error over every band mode resolved at this level.
  double max_error_all = 0.0;
  std::optional<double> slope;  // against the previous level
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  /// Band modes associated at every level. Modes that only appear once the
  /// mesh resolves them would otherwise make the maximum jump upwards.
  std::vector<ModeIndex> tracked;
  double fitted_slope = 0.0;  // least squares over all levels
};

/// Levels from cfg.levels, or (nx, ny) doubled twice when empty.
[[nodiscard]] ConvergenceResult convergence_study(const RunConfig& cfg, std::ostream* log = nullptr);
void write_convergence_csv(std::ostream& os, const ConvergenceResult& res);

struct CompareRow {
  ModeIndex mode;
  double omega2_exact = 0.0;
  double error_first = 0.0;
  double error_second = 0.0;
  /// log10(error_second / error_first): positive when the first layout wins.
  double improvement = 0.0;
};

struct CompareResult {
  std::size_t dof = 0;
  std::vector<CompareRow> rows;
  /// Band modes of one side without a counterpart on the other.
  std::vector<ModeIndex> unmatched;
};

/// Per-mode band errors of two constant-coefficient runs at equal DoF.
[[nodiscard]] CompareResult compare_runs(const RunConfig& first, const RunConfig& second,
                                         std::ostream* log = nullptr);
void write_compare_csv(std::ostream& os, const CompareResult& res);

/// Median of `improvement` over rows accepted by `keep`.
template <typename Pred>
[[nodiscard]] std::optional<double> median_improvement(const CompareResult& res, Pred keep);

struct SweepRow {
  double s = 0.0;
  double omega2 = 0.0;
  std::optional<ModeIndex> mode;
};

/// One solve per s in cfg.s_list with b = (iota(s), 1); rows sorted by s.
/// Up to `threads` solves run concurrently.
[[nodiscard]] std::vector<SweepRow> sweep_surfaces(const RunConfig& cfg, int threads,
                                                   std::ostream* log = nullptr);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// Thread count from FADG_THREADS (default 1, minimum 1).
[[nodiscard]] int threads_from_env();

double median(std::vector<double> v);

template <typename Pred>
std::optional<double> median_improvement(const CompareResult& res, Pred keep) {
  std::vector<double> v;
  for (const auto& r : res.rows) {
    if (keep(r)) v.push_back(r.improvement);
  }
  if (v.empty()) return std::nullopt;
  return median(std::move(v));
}

} // namespace fadg
