// SPDX-License-Identifier: Apache-2.0
#include "fadg/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fadg/error.hpp"

namespace fadg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = first + value.size();
  if (!value.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("invalid value '" + value + "' for key '" + key + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) throw ConfigError("non-finite value for key '" + key + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("invalid boolean '" + value + "' for key '" + key + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

} // namespace

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "nx") nx = parse_number<int>(key, value);
  else if (key == "ny") ny = parse_number<int>(key, value);
  else if (key == "alignment") alignment = value;
  else if (key == "p_xi") p_xi = parse_number<int>(key, value);
  else if (key == "p_eta") p_eta = parse_number<int>(key, value);
  else if (key == "p") p_xi = p_eta = parse_number<int>(key, value);
  else if (key == "b1") b1 = parse_number<double>(key, value);
  else if (key == "b2") b2 = parse_number<double>(key, value);
  else if (key == "s") {
    if (value.empty() || value == "none") s.reset();
    else s = parse_number<double>(key, value);
  }
  else if (key == "eta_s") eta_s = parse_number<double>(key, value);
  else if (key == "omega_max_sq") omega_max_sq = parse_number<double>(key, value);
  else if (key == "search_omega_max_sq") {
    if (value.empty() || value == "none") search_omega_max_sq.reset();
    else search_omega_max_sq = parse_number<double>(key, value);
  }
  else if (key == "min_purity") min_purity = parse_number<double>(key, value);
  else if (key == "m_max") m_max = parse_number<int>(key, value);
  else if (key == "n_max") n_max = parse_number<int>(key, value);
  else if (key == "alpha_file") alpha_file = value;
  else if (key == "beta_file") beta_file = value;
  else if (key == "output_dir") output_dir = value;
  else if (key == "solver") {
    if (value == "lanczos") solver = SolverKind::lanczos;
    else if (value == "dense") solver = SolverKind::dense;
    else throw ConfigError("solver must be 'lanczos' or 'dense', got '" + value + "'");
  }
  else if (key == "tolerance") tolerance = parse_number<double>(key, value);
  else if (key == "max_subspace") max_subspace = parse_number<std::size_t>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "volume_points") volume_points = parse_number<int>(key, value);
  else if (key == "face_points") face_points = parse_number<int>(key, value);
  else if (key == "compare_alignment") compare_alignment = value;
  else if (key == "compare_nx") compare_nx = parse_number<int>(key, value);
  else if (key == "compare_ny") compare_ny = parse_number<int>(key, value);
  else if (key == "compare_p_xi") compare_p_xi = parse_number<int>(key, value);
  else if (key == "compare_p_eta") compare_p_eta = parse_number<int>(key, value);
  else if (key == "levels") {
    levels.clear();
    for (const auto& item : split_list(value)) {
      const auto x = item.find('x');
      if (x == std::string::npos) throw ConfigError("level '" + item + "' is not of the form NxxNy");
      levels.emplace_back(parse_number<int>(key, item.substr(0, x)),
                          parse_number<int>(key, item.substr(x + 1)));
    }
  }
  else if (key == "s_list") {
    s_list.clear();
    for (const auto& item : split_list(value)) s_list.push_back(parse_number<double>(key, item));
  }
  else if (key == "dump_mesh") dump_mesh = parse_bool(key, value);
  else if (key == "dump_matrix") dump_matrix = parse_bool(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

void RunConfig::validate() const {
  if (alignment != "auto") (void)parse_alignment(alignment);
  (void)parse_alignment(compare_alignment == "auto" ? "cartesian" : compare_alignment);
  mesh_config().validate();
  basis().validate();
  if (!(eta_s >= 0.0)) throw ConfigError("eta_s must be >= 0");
  if (!(omega_max_sq > 0.0)) throw ConfigError("omega_max_sq must be > 0");
  if (search_omega_max_sq && *search_omega_max_sq < omega_max_sq) {
    throw ConfigError("search_omega_max_sq must be >= omega_max_sq");
  }
  if (!(min_purity >= 0.0 && min_purity <= 1.0)) throw ConfigError("min_purity must lie in [0, 1]");
  if (m_max < 0 || n_max < 0) throw ConfigError("m_max and n_max must be >= 0");
  if (volume_points < 0 || face_points < 0) throw ConfigError("quadrature point counts must be >= 0");
  band_request().validate();
  for (const auto& [lx, ly] : levels) {
    if (lx < 1 || ly < 1) throw ConfigError("convergence levels need Nx, Ny >= 1");
  }
  for (double v : s_list) {
    if (v < 0.0 || v > 1.0) throw ConfigError("s_list entries must lie in [0, 1]");
  }
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "nx = " << nx << '\n'
     << "ny = " << ny << '\n'
     << "alignment = " << alignment << '\n'
     << "p_xi = " << p_xi << '\n'
     << "p_eta = " << p_eta << '\n'
     << "b1 = " << fmt(b1) << '\n'
     << "b2 = " << fmt(b2) << '\n'
     << "s = " << (s ? fmt(*s) : std::string("none")) << '\n'
     << "eta_s = " << fmt(eta_s) << '\n'
     << "omega_max_sq = " << fmt(omega_max_sq) << '\n'
     << "search_omega_max_sq = " << (search_omega_max_sq ? fmt(*search_omega_max_sq) : std::string("none")) << '\n'
     << "min_purity = " << fmt(min_purity) << '\n'
     << "m_max = " << m_max << '\n'
     << "n_max = " << n_max << '\n'
     << "alpha_file = " << alpha_file << '\n'
     << "beta_file = " << beta_file << '\n'
     << "output_dir = " << output_dir << '\n'
     << "solver = " << (solver == SolverKind::dense ? "dense" : "lanczos") << '\n'
     << "tolerance = " << fmt(tolerance) << '\n'
     << "max_subspace = " << max_subspace << '\n'
     << "seed = " << seed << '\n'
     << "volume_points = " << volume_points << '\n'
     << "face_points = " << face_points << '\n'
     << "compare_alignment = " << compare_alignment << '\n';
  auto opt = [&](const char* k, const std::optional<int>& v) {
    if (v) os << k << " = " << *v << '\n';
  };
  opt("compare_nx", compare_nx);
  opt("compare_ny", compare_ny);
  opt("compare_p_xi", compare_p_xi);
  opt("compare_p_eta", compare_p_eta);
  os << "levels = ";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    os << (i ? "," : "") << levels[i].first << 'x' << levels[i].second;
  }
  os << "\ns_list = ";
  for (std::size_t i = 0; i < s_list.size(); ++i) os << (i ? "," : "") << fmt(s_list[i]);
  os << "\ndump_mesh = " << (dump_mesh ? "true" : "false") << '\n'
     << "dump_matrix = " << (dump_matrix ? "true" : "false") << '\n';
  return os.str();
}

FieldDirection RunConfig::direction() const {
  if (s) return iota_profile(*s);
  return {b1, b2};
}

MeshConfig RunConfig::mesh_config() const {
  MeshConfig mc;
  mc.nx = nx;
  mc.ny = ny;
  mc.b = direction();
  mc.alignment = alignment == "auto" ? choose_alignment(mc.b) : parse_alignment(alignment);
  return mc;
}

BasisSpec RunConfig::basis() const { return {p_xi, p_eta}; }

BandRequest RunConfig::band_request() const {
  BandRequest r;
  r.lambda_max = search_omega_max_sq.value_or(omega_max_sq);
  r.tolerance = tolerance;
  r.max_subspace = max_subspace;
  r.seed = seed;
  return r;
}

AssemblyOptions RunConfig::assembly_options() const { return {volume_points, face_points}; }

CoefficientField RunConfig::alpha() const {
  return alpha_file.empty() ? CoefficientField::constant(1.0) : load_field(alpha_file);
}

CoefficientField RunConfig::beta() const {
  return beta_file.empty() ? CoefficientField::constant(1.0) : load_field(beta_file);
}

RunConfig RunConfig::compare_partner() const {
  RunConfig other = *this;
  other.alignment = compare_alignment;
  if (compare_nx) other.nx = *compare_nx;
  if (compare_ny) other.ny = *compare_ny;
  if (compare_p_xi) other.p_xi = *compare_p_xi;
  if (compare_p_eta) other.p_eta = *compare_p_eta;
  return other;
}

void parse_config(std::istream& in, RunConfig& cfg, const std::string& source) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(source + ":" + std::to_string(lineno) + ": expected key = value", lineno);
    }
    const std::string key = trim(line.substr(0, eq));
    try {
      cfg.set(key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ParseError(source + ":" + std::to_string(lineno) + ": " + e.what(), lineno);
    }
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  RunConfig cfg;
  parse_config(in, cfg, path.string());
  // Field files named in a config file are relative to that file.
  for (std::string* f : {&cfg.alpha_file, &cfg.beta_file}) {
    if (!f->empty() && std::filesystem::path(*f).is_relative()) {
      *f = (path.parent_path() / *f).lexically_normal().string();
    }
  }
  return cfg;
}

} // namespace fadg
