// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fadg/geometry.hpp"

namespace fadg {

struct Harmonic {
  int m = 0;
  int n = 0;
  double c_cos = 0.0;
  double c_sin = 0.0;
};

/// Periodic scalar field  mean + sum c_cos cos(mx+ny) + c_sin sin(mx+ny).
class CoefficientField {
public:
  CoefficientField() = default;
  explicit CoefficientField(double mean, std::vector<Harmonic> harmonics = {})
      : mean_(mean), harmonics_(std::move(harmonics)) {}

  static CoefficientField constant(double value) { return CoefficientField(value); }

  [[nodiscard]] double operator()(double x, double y) const;
  [[nodiscard]] double mean() const { return mean_; }
  [[nodiscard]] const std::vector<Harmonic>& harmonics() const { return harmonics_; }
  [[nodiscard]] bool is_constant() const;

  /// Minimum over a samples x samples grid; throws ConfigError if <= 0.
  void check_positive(int samples = 64) const;

  /// Text form accepted by parse_field.
  [[nodiscard]] std::string to_text() const;

private:
  double mean_ = 1.0;
  std::vector<Harmonic> harmonics_;
};

/// Parses `mean <real>` followed by `<m> <n> <c_cos> <c_sin>` lines; '#'
/// starts a comment. Runs the positivity check.
[[nodiscard]] CoefficientField parse_field(std::istream& in, const std::string& source = "<stream>");
[[nodiscard]] CoefficientField load_field(const std::filesystem::path& path);

struct MagneticField {
  FieldDirection b;
  CoefficientField beta = CoefficientField::constant(1.0);

  /// B(x) = beta(x) * b.
  [[nodiscard]] Vec2 at(double x, double y) const { return beta(x, y) * b.vec(); }
};

/// Linear rotational-transform profile of the W7-X-like test case:
/// b = (iota(s), 1) with iota(s) = 0.85931 (1 - s) + 0.93972 s.
[[nodiscard]] FieldDirection iota_profile(double s);

} // namespace fadg
