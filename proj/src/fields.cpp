// SPDX-License-Identifier: Apache-2.0
#include "fadg/fields.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <sstream>

#include "fadg/error.hpp"

namespace fadg {

namespace {

double wrap_angle(double t) {
  const double r = std::fmod(t, kTwoPi);
  return r < 0.0 ? r + kTwoPi : r;
}

template <typename T>
T parse_number(const std::string& token, const std::string& source, int line) {
  T value{};
  const char* first = token.data();
  const char* last = first + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(source + ":" + std::to_string(line) + ": malformed number '" + token + "'",
                     line);
  }
  return value;
}

} // namespace

double CoefficientField::operator()(double x, double y) const {
  if (harmonics_.empty()) return mean_;
  x = wrap_angle(x);
  y = wrap_angle(y);
  double v = mean_;
  for (const auto& h : harmonics_) {
    const double phase = h.m * x + h.n * y;
    v += h.c_cos * std::cos(phase) + h.c_sin * std::sin(phase);
  }
  return v;
}

bool CoefficientField::is_constant() const {
  for (const auto& h : harmonics_) {
    if ((h.m != 0 || h.n != 0) && (h.c_cos != 0.0 || h.c_sin != 0.0)) return false;
  }
  return true;
}

void CoefficientField::check_positive(int samples) const {
  double min_value = std::numeric_limits<double>::infinity();
  double min_x = 0.0;
  double min_y = 0.0;
  for (int i = 0; i < samples; ++i) {
    for (int j = 0; j < samples; ++j) {
      const double x = kTwoPi * i / samples;
      const double y = kTwoPi * j / samples;
      const double v = (*this)(x, y);
      if (v < min_value) {
        min_value = v;
        min_x = x;
        min_y = y;
      }
    }
  }
  if (!(min_value > 0.0)) {
    std::ostringstream msg;
    msg << "coefficient field is not positive: minimum sample " << min_value << " at (" << min_x
        << ", " << min_y << ")";
    throw ConfigError(msg.str());
  }
}

std::string CoefficientField::to_text() const {
  std::ostringstream os;
  os << std::setprecision(17) << "mean " << mean_ << '\n';
  for (const auto& h : harmonics_) {
    os << h.m << ' ' << h.n << ' ' << h.c_cos << ' ' << h.c_sin << '\n';
  }
  return os.str();
}

CoefficientField parse_field(std::istream& in, const std::string& source) {
  std::string raw;
  int line = 0;
  bool have_mean = false;
  double mean = 0.0;
  std::vector<Harmonic> harmonics;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tokens;
    for (std::string t; ls >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;
    if (tokens[0] == "mean") {
      if (tokens.size() != 2) {
        throw ParseError(source + ":" + std::to_string(line) + ": expected 'mean <real>'", line);
      }
      if (have_mean) {
        throw ParseError(source + ":" + std::to_string(line) + ": duplicate 'mean'", line);
      }
      mean = parse_number<double>(tokens[1], source, line);
      have_mean = true;
      continue;
    }
    if (!have_mean) {
      throw ParseError(source + ":" + std::to_string(line) + ": 'mean' must come first", line);
    }
    if (tokens.size() != 4) {
      throw ParseError(
          source + ":" + std::to_string(line) + ": expected '<m> <n> <c_cos> <c_sin>'", line);
    }
    Harmonic h;
    h.m = parse_number<int>(tokens[0], source, line);
    h.n = parse_number<int>(tokens[1], source, line);
    h.c_cos = parse_number<double>(tokens[2], source, line);
    h.c_sin = parse_number<double>(tokens[3], source, line);
    harmonics.push_back(h);
  }
  if (!have_mean) throw ParseError(source + ": missing 'mean' line", line);
  CoefficientField f(mean, std::move(harmonics));
  f.check_positive();
  return f;
}

CoefficientField load_field(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open coefficient file " + path.string());
  return parse_field(in, path.string());
}

FieldDirection iota_profile(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw ConfigError("flux label s must lie in [0, 1]");
  }
  return {0.85931 * (1.0 - s) + 0.93972 * s, 1.0};
}

} // namespace fadg
