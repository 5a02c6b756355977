// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fadg/assembly.hpp"
#include "fadg/basis.hpp"
#include "fadg/eigensolve.hpp"
#include "fadg/fields.hpp"
#include "fadg/geometry.hpp"

namespace fadg {

enum class SolverKind { lanczos, dense };

/// Effective settings of one run. Defaults describe the constant-coefficient
/// reference case: aligned 8x8 mesh, p = 7x7, b = (1.165939761, 1).
struct RunConfig {
  int nx = 8;
  int ny = 8;
  /// "auto" picks the aligned layout with the smaller aspect ratio.
  std::string alignment = "aligned_bottom_top";
  int p_xi = 7;
  int p_eta = 7;
  double b1 = 1.165939761;
  double b2 = 1.0;
  /// Flux-surface label; when set, b = (iota(s), 1) overrides b1, b2.
  std::optional<double> s;
  double eta_s = 6.0;
  double omega_max_sq = 0.2;
  /// Upper end of the solved band; defaults to omega_max_sq. A wider search
  /// band keeps poorly resolved band modes in view.
  std::optional<double> search_omega_max_sq;
  /// Associations with a smaller purity are rejected.
  double min_purity = 0.3;
  int m_max = 20;
  int n_max = 20;
  std::string alpha_file;
  std::string beta_file;
  std::string output_dir = ".";
  SolverKind solver = SolverKind::lanczos;
  double tolerance = 1e-10;
  std::size_t max_subspace = 20000;
  std::uint64_t seed = 12345;
  int volume_points = 0;
  int face_points = 0;

  // compare: the second layout; unset values follow the first.
  std::string compare_alignment = "cartesian";
  std::optional<int> compare_nx;
  std::optional<int> compare_ny;
  std::optional<int> compare_p_xi;
  std::optional<int> compare_p_eta;

  // convergence: "NxxNy" levels, e.g. "4x16,8x32,16x64". Empty doubles
  // (nx, ny) twice, giving three levels.
  std::vector<std::pair<int, int>> levels;

  // sweep: flux-surface labels.
  std::vector<double> s_list;

  bool dump_mesh = false;
  bool dump_matrix = false;

  /// Assigns one key; throws ConfigError for an unknown key or bad value.
  void set(const std::string& key, const std::string& value);
  /// Throws ConfigError unless every value satisfies the module invariants.
  void validate() const;
  /// One `key = value` line per effective setting, in a fixed order.
  [[nodiscard]] std::string to_text() const;

  [[nodiscard]] FieldDirection direction() const;
  [[nodiscard]] MeshConfig mesh_config() const;
  [[nodiscard]] BasisSpec basis() const;
  [[nodiscard]] BandRequest band_request() const;
  [[nodiscard]] AssemblyOptions assembly_options() const;
  /// Coefficient fields; constant 1 when no file is given.
  [[nodiscard]] CoefficientField alpha() const;
  [[nodiscard]] CoefficientField beta() const;
  /// Second layout of the compare command.
  [[nodiscard]] RunConfig compare_partner() const;
};

/// Reads `key = value` lines into `cfg`; '#' starts a comment.
void parse_config(std::istream& in, RunConfig& cfg, const std::string& source = "<stream>");
/// Throws IoError when the file cannot be read. Relative alpha_file and
/// beta_file entries are resolved against the file's directory.
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

} // namespace fadg
