// SPDX-License-Identifier: Apache-2.0
#include "fadg/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "fadg/error.hpp"

namespace fadg {

namespace {

std::size_t config_dof(const RunConfig& cfg) {
  return static_cast<std::size_t>(cfg.nx) * static_cast<std::size_t>(cfg.ny) *
         static_cast<std::size_t>(cfg.basis().local_dim());
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  const auto path = std::filesystem::path(cfg.output_dir) / name;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

} // namespace

double median(std::vector<double> v) {
  if (v.empty()) throw ConfigError("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

int threads_from_env() {
  const char* env = std::getenv("FADG_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long t = std::strtol(env, &end, 10);
  if (*end != '\0' || t < 1) throw ConfigError(std::string("FADG_THREADS must be a positive integer, got '") + env + "'");
  return static_cast<int>(std::min<long>(t, 256));
}

SolveOutput run_solve(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  const MeshConfig mc = cfg.mesh_config();
  const Mesh mesh = build_mesh(mc);
  const BasisSpec basis = cfg.basis();
  const CoefficientField alpha = cfg.alpha();
  const MagneticField field{mc.b, cfg.beta()};

  const OperatorSet ops = assemble_operators(mesh, basis, alpha, field, cfg.eta_s, cfg.assembly_options());
  const ReducedSystem red = build_reduced(ops);

  SolveOutput out;
  out.dof = red.a.size();
  out.nnz_percent = red.nnz_percent;
  if (log) {
    *log << std::setprecision(6) << "mesh " << to_string(mc.alignment) << ' ' << mc.nx << 'x' << mc.ny
         << " p=" << basis.p_xi << 'x' << basis.p_eta << " b=(" << std::setprecision(10) << mc.b.b1
         << ", " << mc.b.b2 << ")\n"
         << std::setprecision(4) << "DoF " << out.dof << "  nnzA " << out.nnz_percent << "%\n";
  }
  if (cfg.dump_mesh) {
    auto f = open_output(cfg, "mesh.txt");
    mesh.write_summary(f);
  }
  if (cfg.dump_matrix) {
    auto f = open_output(cfg, "matrix_a.txt");
    red.a.write_coordinate(f);
  }

  const BandRequest req = cfg.band_request();
  out.solution = cfg.solver == SolverKind::dense ? band_eig_dense(red.a, red.m, req)
                                                 : band_eig(red.a, red.m, req);
  if (log) {
    for (const auto& w : out.solution.warnings) *log << "warning: " << w << '\n';
    *log << "band count " << out.solution.size() << "  inertia count " << out.solution.inertia_count
         << '\n';
  }

  out.constant_coefficients = alpha.is_constant() && field.beta.is_constant();
  const FourierProjector proj(mesh, basis, cfg.m_max, cfg.n_max);
  const auto tables = proj.amplitudes(out.solution.eigenvectors);
  if (out.constant_coefficients) {
    const double scale = field.beta.mean() * field.beta.mean() / alpha.mean();
    out.assoc = associate_modes(out.solution, tables, mc.b, scale, cfg.min_purity);
    out.analytic_count =
        exact_spectrum(mc.b, cfg.m_max, cfg.n_max).band_count(cfg.omega_max_sq / scale);
    out.band = band_error_report(out.assoc, cfg.omega_max_sq);
    if (log) {
      *log << "analytic band count " << *out.analytic_count << "  max band error "
           << std::setprecision(6) << out.band->max_error << "  trend inversions "
           << trend_inversion_fraction(*out.band) << '\n';
    }
  } else {
    out.assoc = associate_modes(out.solution, tables, std::nullopt, 1.0, cfg.min_purity);
  }
  return out;
}

ConvergenceResult convergence_study(const RunConfig& cfg, std::ostream* log) {
  auto levels = cfg.levels;
  if (levels.empty()) {
    for (int k = 0; k < 3; ++k) levels.emplace_back(cfg.nx << k, cfg.ny << k);
  }
  if (levels.size() < 2) throw ConfigError("convergence study needs at least two levels");
  ConvergenceResult res;
  std::vector<std::map<ModeIndex, double>> per_level;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    RunConfig c = cfg;
    c.nx = levels[k].first;
    c.ny = levels[k].second;
    const SolveOutput o = run_solve(c, log);
    if (!o.band) throw ConfigError("convergence study requires constant coefficients");
    per_level.push_back(errors_by_mode(*o.band));
    ConvergenceRow row{static_cast<int>(k), c.nx, c.ny, o.dof, 0.0, o.band->max_error, std::nullopt};
    res.rows.push_back(row);
  }
  for (const auto& [mode, err] : per_level.front()) {
    const bool everywhere = std::all_of(per_level.begin(), per_level.end(),
                                        [&](const auto& lv) { return lv.contains(mode); });
    if (everywhere) res.tracked.push_back(mode);
  }
  if (res.tracked.empty()) throw SolverError("no band mode is resolved at every convergence level");
  std::vector<double> dofs;
  std::vector<double> errs;
  for (std::size_t k = 0; k < res.rows.size(); ++k) {
    auto& row = res.rows[k];
    for (const auto& mode : res.tracked) row.max_band_error = std::max(row.max_band_error, per_level[k].at(mode));
    if (k > 0) {
      const auto& p = res.rows[k - 1];
      const double dof_ratio = std::log(static_cast<double>(row.dof) / static_cast<double>(p.dof));
      const double err_ratio = std::log(row.max_band_error / p.max_band_error);
      row.slope = (dof_ratio == 0.0 || err_ratio == 0.0) ? 0.0 : -err_ratio / dof_ratio;
      if (log && *row.slope < 0.0) *log << "warning: band error increased at level " << k << '\n';
    }
    dofs.push_back(static_cast<double>(row.dof));
    errs.push_back(row.max_band_error);
  }
  if (log) {
    *log << "tracked band modes " << res.tracked.size() << '\n';
    for (const auto& r : res.rows) {
      *log << "level " << r.level << " max error tracked " << r.max_band_error << " all " << r.max_error_all << '\n';
    }
  }
  res.fitted_slope = convergence_slope(dofs, errs);
  return res;
}

void write_convergence_csv(std::ostream& os, const ConvergenceResult& res) {
  const auto prec = os.precision();
  os << std::setprecision(17) << "level,Nx,Ny,DoF,max_band_error,slope\n";
  for (const auto& r : res.rows) {
    os << r.level << ',' << r.nx << ',' << r.ny << ',' << r.dof << ',' << r.max_band_error << ',';
    if (r.slope) os << *r.slope;
    os << '\n';
  }
  os.precision(prec);
}

CompareResult compare_runs(const RunConfig& first, const RunConfig& second, std::ostream* log) {
  first.validate();
  second.validate();
  if (config_dof(first) != config_dof(second)) {
    throw ConfigError("compare requires equal DoF, got " + std::to_string(config_dof(first)) +
                      " and " + std::to_string(config_dof(second)));
  }
  const SolveOutput a = run_solve(first, log);
  const SolveOutput b = run_solve(second, log);
  if (!a.band || !b.band) throw ConfigError("compare requires constant coefficients");
  const auto ea = errors_by_mode(*a.band);
  const auto eb = errors_by_mode(*b.band);
  const double scale = first.beta().mean() * first.beta().mean() / first.alpha().mean();
  CompareResult res;
  res.dof = a.dof;
  for (const auto& [mode, err] : ea) {
    const auto it = eb.find(mode);
    if (it == eb.end()) {
      res.unmatched.push_back(mode);
      continue;
    }
    CompareRow row;
    row.mode = mode;
    row.omega2_exact = scale * exact_omega2(first.direction(), mode);
    row.error_first = err;
    row.error_second = it->second;
    row.improvement = std::log10(std::max(it->second, 1e-300) / std::max(err, 1e-300));
    res.rows.push_back(row);
  }
  for (const auto& [mode, err] : eb) {
    if (!ea.count(mode)) res.unmatched.push_back(mode);
  }
  if (log && !res.unmatched.empty()) {
    *log << res.unmatched.size() << " band modes appear on one side only\n";
  }
  return res;
}

void write_compare_csv(std::ostream& os, const CompareResult& res) {
  const auto prec = os.precision();
  os << std::setprecision(17) << "m,n,omega2_exact,error_first,error_second,improvement_decades\n";
  for (const auto& r : res.rows) {
    os << r.mode.m << ',' << r.mode.n << ',' << r.omega2_exact << ',' << r.error_first << ','
       << r.error_second << ',' << r.improvement << '\n';
  }
  os.precision(prec);
}

std::vector<SweepRow> sweep_surfaces(const RunConfig& cfg, int threads, std::ostream* log) {
  if (cfg.s_list.empty()) throw ConfigError("sweep requires a non-empty s_list");
  cfg.validate();
  std::vector<std::size_t> order(cfg.s_list.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return cfg.s_list[x] < cfg.s_list[y]; });

  std::vector<std::vector<SweepRow>> per_s(order.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= order.size()) return;
      {
        std::lock_guard<std::mutex> lock(log_mutex);
        if (failure) return;
      }
      try {
        RunConfig c = cfg;
        c.s = cfg.s_list[order[k]];
        std::ostringstream local;
        const SolveOutput o = run_solve(c, log ? &local : nullptr);
        for (const auto& a : o.assoc) per_s[k].push_back({*c.s, a.omega2, a.mode});
        if (log) {
          std::lock_guard<std::mutex> lock(log_mutex);
          *log << "s = " << *c.s << '\n' << local.str();
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(log_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(order.size())));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < per_s.size(); ++k) {
    if (log && k > 0) {
      const std::size_t n = std::min(per_s[k].size(), per_s[k - 1].size());
      for (std::size_t i = 0; i < n; ++i) {
        if (per_s[k][i].mode != per_s[k - 1][i].mode && per_s[k][i].mode && per_s[k - 1][i].mode) {
          *log << "association of eigenvalue " << i << " switches from (" << per_s[k - 1][i].mode->m
               << ',' << per_s[k - 1][i].mode->n << ") to (" << per_s[k][i].mode->m << ','
               << per_s[k][i].mode->n << ") at s = " << per_s[k][i].s << '\n';
        }
      }
    }
    rows.insert(rows.end(), per_s[k].begin(), per_s[k].end());
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  const auto prec = os.precision();
  os << std::setprecision(17) << "s,omega2,m,n\n";
  for (const auto& r : rows) {
    os << r.s << ',' << r.omega2 << ',';
    if (r.mode) os << r.mode->m << ',' << r.mode->n;
    else os << ',';
    os << '\n';
  }
  os.precision(prec);
}

} // namespace fadg
