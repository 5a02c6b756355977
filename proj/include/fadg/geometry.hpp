// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fadg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Constant direction (b1, b2) of the magnetic field in straight-field-line
/// coordinates.
struct FieldDirection {
  double b1 = 1.0;
  double b2 = 1.0;

  /// Throws ConfigError for the zero vector.
  void validate() const;
  [[nodiscard]] Vec2 vec() const { return {b1, b2}; }
};

enum class Alignment { cartesian, aligned_bottom_top, aligned_left_right };

[[nodiscard]] std::string_view to_string(Alignment a);
/// Accepts "cartesian", "aligned_bottom_top", "aligned_left_right" and
/// "auto" (the latter only via choose_alignment by the caller).
[[nodiscard]] Alignment parse_alignment(std::string_view s);

struct MeshConfig {
  int nx = 8;
  int ny = 8;
  Alignment alignment = Alignment::aligned_bottom_top;
  FieldDirection b{};

  void validate() const;
};

/// Edges of the reference square [-1,1]^2. `left`/`right` are xi = -1/+1,
/// `bottom`/`top` are eta = -1/+1. On aligned meshes xi runs along b, so the
/// bottom/top edges are the field-aligned ones whatever the physical axis.
enum class Edge { left, right, bottom, top };

[[nodiscard]] std::string_view to_string(Edge e);

struct CellIndex {
  int i = 0;
  int j = 0;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Parallelogram cell with affine reference map
///   x(xi, eta) = anchor + d_xi * (xi + 1) + d_eta * (eta + 1).
/// d_xi and d_eta are half-edge vectors, so the Jacobian is [d_xi d_eta].
struct Cell {
  CellIndex index;
  Vec2 anchor;
  double dx = 0.0;
  double dy = 0.0;
  /// Offset of the aligned edge across one cell: y-offset over the width for
  /// aligned_bottom_top, x-offset over the height for aligned_left_right.
  double shear = 0.0;
  Vec2 d_xi;
  Vec2 d_eta;

  [[nodiscard]] Mat2 jacobian() const {
    Mat2 j;
    j.col(0) = d_xi;
    j.col(1) = d_eta;
    return j;
  }
  /// |det J|; equals dx * dy / 4 for every layout.
  [[nodiscard]] double jacobian_det() const { return std::abs(jacobian().determinant()); }
  [[nodiscard]] double area() const { return 4.0 * jacobian_det(); }
};

/// One (sub-)segment shared by two cell edges. Ranges are in the reference
/// edge coordinate (eta for left/right edges, xi for bottom/top edges) and
/// are oriented consistently: range[0] on both sides is the same physical
/// point (modulo the periodic wrap).
struct Interface {
  std::size_t owner = 0;
  std::size_t neighbor = 0;
  Edge owner_edge = Edge::right;
  Edge neighbor_edge = Edge::left;
  std::array<double, 2> owner_range{-1.0, 1.0};
  std::array<double, 2> neighbor_range{-1.0, 1.0};
  /// Unit outward normal of the owner cell.
  Vec2 normal;
  /// Physical length of this segment.
  double h_f = 0.0;
  bool wrap_x = false;
  bool wrap_y = false;
};

/// Reference coordinates (xi, eta) of the point at edge coordinate `t`.
[[nodiscard]] std::pair<double, double> edge_point(Edge e, double t);

class Mesh {
public:
  Mesh(MeshConfig config, std::vector<Cell> cells, std::vector<Interface> interfaces);

  [[nodiscard]] const MeshConfig& config() const { return config_; }
  [[nodiscard]] const std::vector<Cell>& cells() const { return cells_; }
  [[nodiscard]] const std::vector<Interface>& interfaces() const { return interfaces_; }
  [[nodiscard]] std::size_t num_cells() const { return cells_.size(); }

  /// Linear cell id, j * nx + i.
  [[nodiscard]] std::size_t cell_id(int i, int j) const;

  /// Number of cells along / across the xi direction of every cell.
  [[nodiscard]] int cells_along() const;
  [[nodiscard]] int cells_across() const;

  [[nodiscard]] double total_area() const;
  [[nodiscard]] double total_interface_length() const;
  /// Half the summed perimeter of all cells, computed from cell geometry.
  [[nodiscard]] double half_perimeter_sum() const;
  [[nodiscard]] bool all_conforming() const;

  /// Debug/golden text: one line per cell and one per interface.
  void write_summary(std::ostream& os) const;

private:
  MeshConfig config_;
  std::vector<Cell> cells_;
  std::vector<Interface> interfaces_;
};

[[nodiscard]] Mesh build_mesh(const MeshConfig& config);

/// Affine map of `cell`, no periodic wrap applied.
[[nodiscard]] Vec2 reference_map(const Cell& cell, double xi, double eta);

/// Aspect-ratio measures of the two aligned layouts; +inf when the layout
/// is impossible for this direction.
struct AspectRatios {
  double bottom_top;
  double left_right;
};
[[nodiscard]] AspectRatios aspect_ratios(const FieldDirection& b);

/// Layout with the smaller aspect ratio; ties go to aligned_bottom_top.
[[nodiscard]] Alignment choose_alignment(const FieldDirection& b);

/// (b2/b1)(Ny/Nx) for aligned_bottom_top, (b1/b2)(Nx/Ny) for
/// aligned_left_right, 0 for cartesian: the per-cell shift of the
/// non-aligned edges in units of the cell size across the field.
[[nodiscard]] double cell_shift(const MeshConfig& config);

} // namespace fadg
