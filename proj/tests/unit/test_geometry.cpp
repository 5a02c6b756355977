// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "brute_force.hpp"
#include "fadg/error.hpp"
#include "fadg/geometry.hpp"

using namespace fadg;

namespace {

const FieldDirection kReference{1.165939761, 1.0};

Mesh make(int nx, int ny, Alignment a, FieldDirection b) { return build_mesh({nx, ny, a, b}); }

// Length of every cell edge, summed over cells and halved.
double edge_length_half(const Mesh& mesh) {
  double s = 0.0;
  for (const auto& c : mesh.cells()) {
    s += 2.0 * c.d_xi.norm() + 2.0 * c.d_eta.norm();
  }
  return s;
}

bool is_aligned_edge(const Mesh& mesh, Edge e) {
  return mesh.config().alignment != Alignment::cartesian && (e == Edge::bottom || e == Edge::top);
}

} // namespace

TEST_CASE("cartesian 2x2 mesh has 8 conforming interfaces of length pi") {
  const Mesh mesh = make(2, 2, Alignment::cartesian, {0.3, 1.0});
  CHECK(mesh.num_cells() == 4);
  REQUIRE(mesh.interfaces().size() == 8);
  CHECK(mesh.all_conforming());
  for (const auto& f : mesh.interfaces()) CHECK(f.h_f == doctest::Approx(M_PI).epsilon(1e-14));
  CHECK(mesh.total_area() == doctest::Approx(4.0 * M_PI * M_PI).epsilon(1e-14));
}

TEST_CASE("integer shift gives conforming vertical interfaces two rows apart") {
  const Mesh mesh = make(4, 4, Alignment::aligned_bottom_top, {1.0, 2.0});
  CHECK(cell_shift(mesh.config()) == doctest::Approx(2.0));
  CHECK(mesh.all_conforming());
  int vertical = 0;
  for (const auto& f : mesh.interfaces()) {
    if (f.owner_edge != Edge::right) continue;
    ++vertical;
    const auto& o = mesh.cells()[f.owner].index;
    const auto& n = mesh.cells()[f.neighbor].index;
    CHECK(f.neighbor_edge == Edge::left);
    CHECK(n.i == (o.i + 1) % 4);
    CHECK(n.j == (o.j + 2) % 4);
  }
  CHECK(vertical == 16);
}

TEST_CASE("reference direction splits every vertical interface in two") {
  const Mesh mesh = make(8, 8, Alignment::aligned_bottom_top, kReference);
  const double s = 1.0 / 1.165939761;
  CHECK(cell_shift(mesh.config()) == doctest::Approx(s).epsilon(1e-12));
  CHECK_FALSE(mesh.all_conforming());
  std::map<std::size_t, std::vector<double>> fractions;
  for (const auto& f : mesh.interfaces()) {
    if (f.owner_edge != Edge::right) continue;
    fractions[f.owner].push_back((f.owner_range[1] - f.owner_range[0]) / 2.0);
  }
  CHECK(fractions.size() == 64);
  for (auto& [cell, fr] : fractions) {
    REQUIRE(fr.size() == 2);
    std::sort(fr.begin(), fr.end());
    CHECK(fr[0] == doctest::Approx(1.0 - s).epsilon(1e-12));
    CHECK(fr[1] == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("reference map evaluates the affine formula") {
  Cell c;
  c.anchor = {0.0, 0.0};
  c.dx = M_PI;
  c.dy = M_PI;
  c.shear = M_PI / 3.0;
  c.d_xi = {M_PI / 2.0, M_PI / 6.0};
  c.d_eta = {0.0, M_PI / 2.0};
  const Vec2 x = reference_map(c, 1.0, 0.0);
  CHECK(x.x() == doctest::Approx(M_PI));
  CHECK(x.y() == doctest::Approx(M_PI / 3.0 + M_PI / 2.0));
  const Vec2 corner = reference_map(c, -1.0, -1.0);
  CHECK(corner.norm() == 0.0);
}

TEST_CASE("aligned cell vertices follow the sheared layout") {
  const FieldDirection b{1.3, 0.7};
  const Mesh mesh = make(3, 5, Alignment::aligned_bottom_top, b);
  const double dx = 2.0 * M_PI / 3.0;
  const double dy = 2.0 * M_PI / 5.0;
  const double delta = b.b2 / b.b1 * dx;
  for (const auto& c : mesh.cells()) {
    const Vec2 v0 = reference_map(c, -1, -1);
    const Vec2 v1 = reference_map(c, 1, -1);
    const Vec2 v2 = reference_map(c, 1, 1);
    CHECK(v0.x() == doctest::Approx(c.index.i * dx));
    CHECK(std::fmod(v0.y(), 2 * M_PI) == doctest::Approx(std::fmod(c.index.j * dy, 2 * M_PI)));
    CHECK((v1 - v0 - Vec2(dx, delta)).norm() < 1e-13);
    CHECK((v2 - v1 - Vec2(0.0, dy)).norm() < 1e-13);
    CHECK(c.jacobian_det() == doctest::Approx(dx * dy / 4.0).epsilon(1e-14));
    // xi tangent is parallel to b
    CHECK(std::abs(c.d_xi.x() * b.b2 - c.d_xi.y() * b.b1) < 1e-14 * c.d_xi.norm());
  }
}

TEST_CASE("aspect ratios and alignment choice") {
  auto ar = aspect_ratios({1.0, 1.0});
  CHECK(ar.bottom_top == doctest::Approx(std::sqrt(2.0)));
  CHECK(ar.left_right == doctest::Approx(std::sqrt(2.0)));
  ar = aspect_ratios({2.0, 7.0});
  CHECK(ar.bottom_top == doctest::Approx(3.6401).epsilon(1e-4));
  CHECK(ar.left_right == doctest::Approx(1.0400).epsilon(1e-4));
  ar = aspect_ratios({1.0, 0.0});
  CHECK(ar.bottom_top == 1.0);
  CHECK(std::isinf(ar.left_right));
  CHECK(choose_alignment(kReference) == Alignment::aligned_bottom_top);
  CHECK(choose_alignment({2.0, 7.0}) == Alignment::aligned_left_right);
  CHECK(choose_alignment({1.0, 1.0}) == Alignment::aligned_bottom_top);
}

TEST_CASE("invalid configurations are rejected") {
  CHECK_THROWS_AS((void)build_mesh({0, 4, Alignment::cartesian, {1, 1}}), ConfigError);
  CHECK_THROWS_AS((void)build_mesh({4, 0, Alignment::cartesian, {1, 1}}), ConfigError);
  CHECK_THROWS_AS((void)build_mesh({4, 4, Alignment::aligned_bottom_top, {0.0, 1.0}}), ConfigError);
  CHECK_THROWS_AS((void)build_mesh({4, 4, Alignment::aligned_left_right, {1.0, 0.0}}), ConfigError);
  CHECK_THROWS_AS(FieldDirection({0.0, 0.0}).validate(), ConfigError);
  CHECK_THROWS_AS((void)parse_alignment("diagonal"), ConfigError);
}

TEST_CASE("partition, alignment and normal properties over many layouts") {
  const std::vector<FieldDirection> dirs{{1.0, 2.0}, {1.0, 1.0}, kReference, {2.0, 7.0},
                                         {0.5, std::sqrt(2.0)}, {-1.3, 1.0}, {3.0, 1.0}};
  for (const auto& b : dirs) {
    for (auto a : {Alignment::cartesian, Alignment::aligned_bottom_top, Alignment::aligned_left_right}) {
      for (auto [nx, ny] : {std::pair{1, 1}, std::pair{2, 3}, std::pair{4, 4}, std::pair{3, 8}}) {
        CAPTURE(b.b1);
        CAPTURE(b.b2);
        CAPTURE(to_string(a));
        CAPTURE(nx);
        CAPTURE(ny);
        const Mesh mesh = make(nx, ny, a, b);
        CHECK(mesh.total_area() == doctest::Approx(4 * M_PI * M_PI).epsilon(1e-13));
        CHECK(mesh.total_interface_length() == doctest::Approx(edge_length_half(mesh)).epsilon(1e-12));
        const double s = cell_shift(mesh.config());
        const bool integral = std::abs(s - std::round(s)) < 1e-12;
        CHECK(mesh.all_conforming() == integral);
        for (const auto& f : mesh.interfaces()) {
          CHECK(std::abs(f.normal.norm() - 1.0) < 1e-14);
          CHECK(f.h_f > 0.0);
          // both ranges describe the same physical segment
          const auto [oxi0, oeta0] = edge_point(f.owner_edge, f.owner_range[0]);
          const auto [nxi0, neta0] = edge_point(f.neighbor_edge, f.neighbor_range[0]);
          const auto [oxi1, oeta1] = edge_point(f.owner_edge, f.owner_range[1]);
          const Vec2 po = reference_map(mesh.cells()[f.owner], oxi0, oeta0);
          const Vec2 pn = reference_map(mesh.cells()[f.neighbor], nxi0, neta0);
          const Vec2 d = po - pn;
          const double wx = std::remainder(d.x(), 2 * M_PI);
          const double wy = std::remainder(d.y(), 2 * M_PI);
          CHECK(std::hypot(wx, wy) < 1e-12);
          const Vec2 end = reference_map(mesh.cells()[f.owner], oxi1, oeta1);
          CHECK((end - po).norm() == doctest::Approx(f.h_f).epsilon(1e-12));
          CHECK(std::abs(f.normal.dot(end - po)) < 1e-12);
          if (is_aligned_edge(mesh, f.owner_edge)) {
            CHECK(std::abs(b.vec().dot(f.normal)) <= 1e-14 * b.vec().norm());
          }
        }
      }
    }
  }
}

TEST_CASE("interfaces agree with an independent edge-overlap search") {
  for (auto a : {Alignment::cartesian, Alignment::aligned_bottom_top, Alignment::aligned_left_right}) {
    for (const auto& b : {kReference, FieldDirection{2.0, 7.0}, FieldDirection{1.0, 2.0}}) {
      const Mesh mesh = make(2, 3, a, b);
      const auto faces = oracle::find_faces(mesh);
      REQUIRE(faces.size() == mesh.interfaces().size());
      // pair lengths keyed by unordered cell pair and normal direction
      std::map<std::tuple<std::size_t, std::size_t, long, long>, double> lib;
      std::map<std::tuple<std::size_t, std::size_t, long, long>, double> ora;
      auto key = [](std::size_t p, std::size_t q, Vec2 n) {
        if (p > q || (p == q && (n.x() < 0 || (n.x() == 0 && n.y() < 0)))) {
          std::swap(p, q);
          n = -n;
        }
        return std::tuple{p, q, std::lround(n.x() * 1e8), std::lround(n.y() * 1e8)};
      };
      for (const auto& f : mesh.interfaces()) lib[key(f.owner, f.neighbor, f.normal)] += f.h_f;
      for (const auto& f : faces) ora[key(f.cell_a, f.cell_b, f.normal)] += f.length;
      REQUIRE(lib.size() == ora.size());
      for (const auto& [k, len] : lib) {
        REQUIRE(ora.count(k) == 1);
        CHECK(len == doctest::Approx(ora[k]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("mesh summary lists every cell and interface") {
  const Mesh mesh = make(2, 2, Alignment::aligned_bottom_top, kReference);
  std::ostringstream os;
  mesh.write_summary(os);
  const std::string text = os.str();
  const auto lines = std::count(text.begin(), text.end(), '\n');
  CHECK(lines == 1 + static_cast<long>(mesh.num_cells() + mesh.interfaces().size()));
}
