// SPDX-License-Identifier: Apache-2.0
// Command-line driver: solve, convergence, compare, sweep, exact-spectrum.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fadg/config.hpp"
#include "fadg/error.hpp"
#include "fadg/pipeline.hpp"
#include "fadg/spectrum.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kSolverError = 3;
constexpr int kIoError = 4;

/// Applies `--key value` and `--key=value` pairs left over by CLI11.
void apply_overrides(fadg::RunConfig& cfg, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& tok = extras[i];
    if (tok.rfind("--", 0) != 0) throw fadg::ConfigError("unexpected argument '" + tok + "'");
    std::string key = tok.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key.erase(eq);
    } else {
      if (i + 1 >= extras.size()) throw fadg::ConfigError("missing value for '" + tok + "'");
      value = extras[++i];
    }
    for (char& c : key) {
      if (c == '-') c = '_';
    }
    cfg.set(key, value);
  }
}

std::ofstream open_csv(const fadg::RunConfig& cfg, const std::string& explicit_path,
                       const std::string& default_name, std::string& used) {
  std::filesystem::path path = explicit_path;
  if (path.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    path = std::filesystem::path(cfg.output_dir) / default_name;
  }
  std::ofstream out(path);
  if (!out) throw fadg::IoError("cannot write '" + path.string() + "'");
  used = path.string();
  return out;
}

void echo_config(const fadg::RunConfig& cfg) {
  std::istringstream in(cfg.to_text());
  std::string line;
  while (std::getline(in, line)) std::cerr << "# " << line << '\n';
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Field-aligned DG eigenvalue solver for anisotropic diffusion on a flux surface"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "key=value configuration file");
    sub->add_option("-o,--output", output_path, "CSV output path (default: <output_dir>/<command>.csv)");
    sub->allow_extras();
    sub->footer("Any config key can be overridden with --key value.");
    return sub;
  };
  auto* solve = add_common(app.add_subcommand("solve", "band eigenpairs of one configuration"));
  auto* conv = add_common(app.add_subcommand("convergence", "max band error over refinement levels"));
  auto* compare = add_common(app.add_subcommand("compare", "per-mode errors of two layouts at equal DoF"));
  auto* sweep = add_common(app.add_subcommand("sweep", "band spectra over flux surfaces s_list"));
  auto* exact = add_common(app.add_subcommand("exact-spectrum", "analytic constant-coefficient spectrum"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    fadg::RunConfig cfg = config_path.empty() ? fadg::RunConfig{} : fadg::load_config(config_path);
    apply_overrides(cfg, sub->remaining());
    cfg.validate();
    echo_config(cfg);
    std::string used;

    if (sub == solve) {
      const auto out = fadg::run_solve(cfg, &std::cerr);
      auto f = open_csv(cfg, output_path, "spectrum.csv", used);
      fadg::write_spectrum_csv(f, out.assoc);
    } else if (sub == conv) {
      const auto res = fadg::convergence_study(cfg, &std::cerr);
      auto f = open_csv(cfg, output_path, "convergence.csv", used);
      fadg::write_convergence_csv(f, res);
      std::cerr << "fitted slope " << res.fitted_slope << '\n';
    } else if (sub == compare) {
      const auto res = fadg::compare_runs(cfg, cfg.compare_partner(), &std::cerr);
      auto f = open_csv(cfg, output_path, "compare.csv", used);
      fadg::write_compare_csv(f, res);
      if (!res.rows.empty()) {
        std::cerr << "median improvement "
                  << *fadg::median_improvement(res, [](const auto&) { return true; }) << " decades\n";
      }
    } else if (sub == sweep) {
      const auto rows = fadg::sweep_surfaces(cfg, fadg::threads_from_env(), &std::cerr);
      auto f = open_csv(cfg, output_path, "sweep.csv", used);
      fadg::write_sweep_csv(f, rows);
    } else if (sub == exact) {
      const auto spec = fadg::exact_spectrum(cfg.direction(), cfg.m_max, cfg.n_max);
      auto f = open_csv(cfg, output_path, "exact_spectrum.csv", used);
      fadg::write_exact_csv(f, spec);
      std::cerr << "band count " << spec.band_count(cfg.omega_max_sq) << '\n';
    }
    std::cerr << "wrote " << used << '\n';
    return kOk;
  } catch (const fadg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fadg::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const fadg::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverError;
  } catch (const fadg::GeometryError& e) {
    std::cerr << "geometry failure: " << e.what() << '\n';
    return kSolverError;
  }
}
