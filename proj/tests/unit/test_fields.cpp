// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fadg/error.hpp"
#include "fadg/fields.hpp"

using namespace fadg;

namespace {
CoefficientField parse(const std::string& text) {
  std::istringstream in(text);
  return parse_field(in);
}
} // namespace

TEST_CASE("field evaluation") {
  CHECK(CoefficientField::constant(1.0)(2.0, -7.0) == 1.0);
  const CoefficientField f(1.0, {{1, 1, 0.3, 0.0}});
  CHECK(f(0.0, 0.0) == doctest::Approx(1.3));
  const CoefficientField g(1.0, {{2, -1, 0.3, 0.0}});
  CHECK(g(M_PI / 2, M_PI / 4) == doctest::Approx(0.787868).epsilon(1e-6));
  const CoefficientField h(0.5, {{0, 3, 0.0, 0.2}});
  CHECK(h(0.0, M_PI / 6) == doctest::Approx(0.7));
}

TEST_CASE("fields are periodic and the constant path agrees with the harmonic sum") {
  const CoefficientField f(1.0, {{1, -2, 0.1, 0.05}, {3, 1, -0.02, 0.07}});
  for (double x : {-4.0, 0.0, 1.1, 5.9}) {
    for (double y : {-0.3, 2.0, 6.1}) {
      CHECK(std::abs(f(x, y) - f(x + 2 * M_PI, y)) < 1e-13);
      CHECK(std::abs(f(x, y) - f(x, y + 2 * M_PI)) < 1e-13);
    }
  }
  const CoefficientField zero_harmonic(2.0, {{1, 1, 0.0, 0.0}});
  CHECK(zero_harmonic.is_constant());
  CHECK(zero_harmonic(0.4, 0.9) == CoefficientField::constant(2.0)(0.4, 0.9));
  CHECK_FALSE(f.is_constant());
}

TEST_CASE("field file parsing") {
  auto f = parse("# constant\nmean 1.0\n");
  CHECK(f.is_constant());
  CHECK(f(1.0, 2.0) == 1.0);
  f = parse("mean 1\n1 0 0.3 0.0  # cos x\n");
  CHECK(f(0.0, 5.0) == doctest::Approx(1.3));
  CHECK(f(M_PI, 5.0) == doctest::Approx(0.7));
  // round trip
  const auto g = parse(f.to_text());
  CHECK(g(0.7, 0.2) == f(0.7, 0.2));
}

TEST_CASE("field file errors name the line") {
  try {
    (void)parse("mean 1.0\n1 0 abc 0.0\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  CHECK_THROWS_AS((void)parse("1 0 0.3 0.0\n"), ParseError);
  CHECK_THROWS_AS((void)parse("mean 1\nmean 2\n"), ParseError);
  CHECK_THROWS_AS((void)parse("mean 1\n1 0 0.3\n"), ParseError);
  // positivity violation reports the minimum
  try {
    (void)parse("mean 0.5\n1 0 1.0 0.0\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("-0.5") != std::string::npos);
  }
  CHECK_THROWS_AS((void)load_field("/nonexistent/field.txt"), IoError);
}

TEST_CASE("iota profile endpoints and midpoint") {
  auto b = iota_profile(0.0);
  CHECK(b.b1 == doctest::Approx(0.85931));
  CHECK(b.b2 == 1.0);
  b = iota_profile(1.0);
  CHECK(b.b1 == doctest::Approx(0.93972));
  // linear interpolation of the two endpoints
  b = iota_profile(0.5);
  CHECK(b.b1 == doctest::Approx(0.899515).epsilon(1e-12));
  CHECK_THROWS_AS((void)iota_profile(-0.1), ConfigError);
  CHECK_THROWS_AS((void)iota_profile(1.5), ConfigError);
}

TEST_CASE("magnetic field scales the direction by beta") {
  const MagneticField field{{2.0, 1.0}, CoefficientField(1.0, {{0, 1, 0.1, 0.0}})};
  const Vec2 v = field.at(0.3, 0.0);
  CHECK(v.x() == doctest::Approx(2.2));
  CHECK(v.y() == doctest::Approx(1.1));
}
