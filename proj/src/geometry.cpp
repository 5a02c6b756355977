// SPDX-License-Identifier: Apache-2.0
#include "fadg/geometry.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "fadg/error.hpp"

namespace fadg {

namespace {

// Break points closer than this (in units of one cell across the field) to
// a grid line are snapped onto it.
constexpr double kSnapTolerance = 1e-12;

// Maps (along, across) indices to physical (i, j).
struct Layout {
  Alignment alignment;
  int nx;
  int ny;

  [[nodiscard]] int along() const {
    return alignment == Alignment::aligned_left_right ? ny : nx;
  }
  [[nodiscard]] int across() const {
    return alignment == Alignment::aligned_left_right ? nx : ny;
  }
  [[nodiscard]] CellIndex index(int a, int c) const {
    if (alignment == Alignment::aligned_left_right) return {c, a};
    return {a, c};
  }
  [[nodiscard]] std::size_t id(int a, int c) const {
    const CellIndex ij = index(a, c);
    return static_cast<std::size_t>(ij.j) * static_cast<std::size_t>(nx) +
           static_cast<std::size_t>(ij.i);
  }
};

int wrap_index(long long k, int n) {
  const long long r = k % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

Vec2 outward_normal(const Cell& cell, Edge e) {
  const Mat2 jinv_t = cell.jacobian().inverse().transpose();
  Vec2 n;
  switch (e) {
  case Edge::left: n = -jinv_t.col(0); break;
  case Edge::right: n = jinv_t.col(0); break;
  case Edge::bottom: n = -jinv_t.col(1); break;
  case Edge::top: n = jinv_t.col(1); break;
  }
  return n.normalized();
}

// Physical length per unit of reference edge coordinate.
double edge_metric(const Cell& cell, Edge e) {
  return (e == Edge::left || e == Edge::right) ? cell.d_eta.norm() : cell.d_xi.norm();
}

Vec2 edge_physical(const Cell& cell, Edge e, double t) {
  const auto [xi, eta] = edge_point(e, t);
  return reference_map(cell, xi, eta);
}

// Fills normal, h_f and wrap flags, and checks that both sides of the
// interface describe the same physical segment.
void finish_interface(Interface& f, const std::vector<Cell>& cells) {
  const Cell& own = cells[f.owner];
  const Cell& nbr = cells[f.neighbor];
  f.normal = outward_normal(own, f.owner_edge);
  f.h_f = std::abs(f.owner_range[1] - f.owner_range[0]) * edge_metric(own, f.owner_edge);

  Vec2 shift = Vec2::Zero();
  for (int end = 0; end < 2; ++end) {
    const Vec2 p = edge_physical(own, f.owner_edge, f.owner_range[end]);
    const Vec2 q = edge_physical(nbr, f.neighbor_edge, f.neighbor_range[end]);
    const Vec2 d = p - q;
    const Vec2 periods(std::round(d.x() / kTwoPi), std::round(d.y() / kTwoPi));
    const Vec2 residual = d - kTwoPi * periods;
    if (residual.norm() > 1e-9) {
      std::ostringstream msg;
      msg << "interface between cells " << f.owner << " and " << f.neighbor
          << " does not describe a common segment (mismatch " << residual.norm() << ")";
      throw GeometryError(msg.str());
    }
    shift = periods;
  }
  f.wrap_x = shift.x() != 0.0;
  f.wrap_y = shift.y() != 0.0;

  const double len_n =
      std::abs(f.neighbor_range[1] - f.neighbor_range[0]) * edge_metric(nbr, f.neighbor_edge);
  if (std::abs(len_n - f.h_f) > 1e-10 * (1.0 + f.h_f)) {
    throw GeometryError("interface segment lengths differ between owner and neighbor");
  }
}

} // namespace

void FieldDirection::validate() const {
  if (!std::isfinite(b1) || !std::isfinite(b2)) throw ConfigError("field direction must be finite");
  if (b1 == 0.0 && b2 == 0.0) throw ConfigError("field direction (b1, b2) must be nonzero");
}

std::string_view to_string(Alignment a) {
  switch (a) {
  case Alignment::cartesian: return "cartesian";
  case Alignment::aligned_bottom_top: return "aligned_bottom_top";
  case Alignment::aligned_left_right: return "aligned_left_right";
  }
  return "?";
}

Alignment parse_alignment(std::string_view s) {
  if (s == "cartesian") return Alignment::cartesian;
  if (s == "aligned_bottom_top") return Alignment::aligned_bottom_top;
  if (s == "aligned_left_right") return Alignment::aligned_left_right;
  throw ConfigError("unknown alignment '" + std::string(s) + "'");
}

std::string_view to_string(Edge e) {
  switch (e) {
  case Edge::left: return "left";
  case Edge::right: return "right";
  case Edge::bottom: return "bottom";
  case Edge::top: return "top";
  }
  return "?";
}

void MeshConfig::validate() const {
  if (nx < 1 || ny < 1) throw ConfigError("cell counts Nx, Ny must be >= 1");
  b.validate();
  if (alignment == Alignment::aligned_bottom_top && b.b1 == 0.0) {
    throw ConfigError("aligned_bottom_top requires b1 != 0");
  }
  if (alignment == Alignment::aligned_left_right && b.b2 == 0.0) {
    throw ConfigError("aligned_left_right requires b2 != 0");
  }
}

std::pair<double, double> edge_point(Edge e, double t) {
  switch (e) {
  case Edge::left: return {-1.0, t};
  case Edge::right: return {1.0, t};
  case Edge::bottom: return {t, -1.0};
  case Edge::top: return {t, 1.0};
  }
  return {0.0, 0.0};
}

Vec2 reference_map(const Cell& cell, double xi, double eta) {
  return cell.anchor + cell.d_xi * (xi + 1.0) + cell.d_eta * (eta + 1.0);
}

double cell_shift(const MeshConfig& config) {
  switch (config.alignment) {
  case Alignment::cartesian: return 0.0;
  case Alignment::aligned_bottom_top:
    return (config.b.b2 / config.b.b1) * (static_cast<double>(config.ny) / config.nx);
  case Alignment::aligned_left_right:
    return (config.b.b1 / config.b.b2) * (static_cast<double>(config.nx) / config.ny);
  }
  return 0.0;
}

Mesh::Mesh(MeshConfig config, std::vector<Cell> cells, std::vector<Interface> interfaces)
    : config_(config), cells_(std::move(cells)), interfaces_(std::move(interfaces)) {}

std::size_t Mesh::cell_id(int i, int j) const {
  return static_cast<std::size_t>(j) * static_cast<std::size_t>(config_.nx) +
         static_cast<std::size_t>(i);
}

int Mesh::cells_along() const {
  return config_.alignment == Alignment::aligned_left_right ? config_.ny : config_.nx;
}

int Mesh::cells_across() const {
  return config_.alignment == Alignment::aligned_left_right ? config_.nx : config_.ny;
}

double Mesh::total_area() const {
  double a = 0.0;
  for (const auto& c : cells_) a += c.area();
  return a;
}

double Mesh::total_interface_length() const {
  double l = 0.0;
  for (const auto& f : interfaces_) l += f.h_f;
  return l;
}

double Mesh::half_perimeter_sum() const {
  double p = 0.0;
  for (const auto& c : cells_) p += 2.0 * (c.d_xi.norm() + c.d_eta.norm());
  return p;
}

bool Mesh::all_conforming() const {
  for (const auto& f : interfaces_) {
    if (f.owner_range[0] != -1.0 || f.owner_range[1] != 1.0) return false;
  }
  return true;
}

void Mesh::write_summary(std::ostream& os) const {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17);
  os << "mesh " << config_.nx << ' ' << config_.ny << ' ' << to_string(config_.alignment) << ' '
     << config_.b.b1 << ' ' << config_.b.b2 << '\n';
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    const Cell& c = cells_[k];
    os << "cell " << k << ' ' << c.index.i << ' ' << c.index.j << ' ' << c.anchor.x() << ' '
       << c.anchor.y() << ' ' << c.shear << '\n';
  }
  for (const auto& f : interfaces_) {
    os << "face " << f.owner << ' ' << f.neighbor << ' ' << to_string(f.owner_edge) << ' '
       << to_string(f.neighbor_edge) << ' ' << f.owner_range[0] << ' ' << f.owner_range[1]
       << ' ' << f.neighbor_range[0] << ' ' << f.neighbor_range[1] << ' ' << f.h_f << ' '
       << (f.wrap_x ? 1 : 0) << ' ' << (f.wrap_y ? 1 : 0) << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

Mesh build_mesh(const MeshConfig& config) {
  config.validate();
  const Layout layout{config.alignment, config.nx, config.ny};
  const double dx = kTwoPi / config.nx;
  const double dy = kTwoPi / config.ny;

  double shear = 0.0;
  Vec2 d_xi;
  Vec2 d_eta;
  switch (config.alignment) {
  case Alignment::cartesian:
    d_xi = {dx / 2, 0.0};
    d_eta = {0.0, dy / 2};
    break;
  case Alignment::aligned_bottom_top:
    shear = (config.b.b2 / config.b.b1) * dx;
    d_xi = {dx / 2, shear / 2};
    d_eta = {0.0, dy / 2};
    break;
  case Alignment::aligned_left_right:
    shear = (config.b.b1 / config.b.b2) * dy;
    d_xi = {shear / 2, dy / 2};
    d_eta = {dx / 2, 0.0};
    break;
  }

  std::vector<Cell> cells(static_cast<std::size_t>(config.nx) * config.ny);
  for (int j = 0; j < config.ny; ++j) {
    for (int i = 0; i < config.nx; ++i) {
      Cell& c = cells[static_cast<std::size_t>(j) * config.nx + i];
      c.index = {i, j};
      c.anchor = {i * dx, j * dy};
      c.dx = dx;
      c.dy = dy;
      c.shear = shear;
      c.d_xi = d_xi;
      c.d_eta = d_eta;
    }
  }

  const int na = layout.along();
  const int nc = layout.across();

  // Shift of the right (xi = +1) edge against the grid of the next column,
  // in cell units across the field: s = k + frac.
  double s = cell_shift(config);
  if (std::abs(s - std::round(s)) <= kSnapTolerance) s = std::round(s);
  const double k_floor = std::floor(s);
  double frac = s - k_floor;
  if (frac <= kSnapTolerance) frac = 0.0;
  const long long k = static_cast<long long>(k_floor);

  std::vector<Interface> faces;
  faces.reserve(cells.size() * 3);
  for (int a = 0; a < na; ++a) {
    for (int c = 0; c < nc; ++c) {
      const std::size_t own = layout.id(a, c);

      // Aligned (conforming) edge: top of (a, c) against bottom of (a, c + 1).
      Interface top;
      top.owner = own;
      top.neighbor = layout.id(a, wrap_index(c + 1, nc));
      top.owner_edge = Edge::top;
      top.neighbor_edge = Edge::bottom;
      faces.push_back(top);

      // Non-aligned edge: right of (a, c) against left edges of column a + 1.
      const int a_next = wrap_index(a + 1, na);
      if (frac == 0.0) {
        Interface f;
        f.owner = own;
        f.neighbor = layout.id(a_next, wrap_index(c + k, nc));
        f.owner_edge = Edge::right;
        f.neighbor_edge = Edge::left;
        faces.push_back(f);
      } else {
        const double split = 1.0 - 2.0 * frac;  // owner coordinate of the grid line
        Interface lower;
        lower.owner = own;
        lower.neighbor = layout.id(a_next, wrap_index(c + k, nc));
        lower.owner_edge = Edge::right;
        lower.neighbor_edge = Edge::left;
        lower.owner_range = {-1.0, split};
        lower.neighbor_range = {2.0 * frac - 1.0, 1.0};
        faces.push_back(lower);

        Interface upper = lower;
        upper.neighbor = layout.id(a_next, wrap_index(c + k + 1, nc));
        upper.owner_range = {split, 1.0};
        upper.neighbor_range = {-1.0, 2.0 * frac - 1.0};
        faces.push_back(upper);
      }
    }
  }
  for (auto& f : faces) finish_interface(f, cells);
  return Mesh(config, std::move(cells), std::move(faces));
}

AspectRatios aspect_ratios(const FieldDirection& b) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  AspectRatios ar{inf, inf};
  if (b.b1 != 0.0) ar.bottom_top = std::sqrt(1.0 + (b.b2 / b.b1) * (b.b2 / b.b1));
  if (b.b2 != 0.0) ar.left_right = std::sqrt(1.0 + (b.b1 / b.b2) * (b.b1 / b.b2));
  return ar;
}

Alignment choose_alignment(const FieldDirection& b) {
  b.validate();
  const AspectRatios ar = aspect_ratios(b);
  return ar.left_right < ar.bottom_top ? Alignment::aligned_left_right
                                       : Alignment::aligned_bottom_top;
}

} // namespace fadg
