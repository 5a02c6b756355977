// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <complex>
#include <iosfwd>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "fadg/basis.hpp"
#include "fadg/eigensolve.hpp"
#include "fadg/geometry.hpp"
#include "fadg/linalg.hpp"

namespace fadg {

/// Canonical representative of the pair {(m,n), (-m,-n)}: m > 0, or m = 0
/// and n >= 0.
struct ModeIndex {
  int m = 0;
  int n = 0;

  [[nodiscard]] static ModeIndex canonical(int m, int n);
  [[nodiscard]] bool is_canonical() const { return m > 0 || (m == 0 && n >= 0); }
  [[nodiscard]] int max_abs() const;
  [[nodiscard]] int l1() const;
  friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;
};

/// (b1 m + b2 n)^2.
[[nodiscard]] double exact_omega2(const FieldDirection& b, ModeIndex mode);

struct ExactSpectrum {
  int m_max = 0;
  int n_max = 0;
  std::map<ModeIndex, double> entries;

  [[nodiscard]] double at(ModeIndex mode) const;
  /// Eigenvalue count in [0, omega_max_sq] counting (0,0) once and every
  /// other canonical mode twice.
  [[nodiscard]] long band_count(double omega_max_sq) const;
  /// Canonical band modes ordered by (omega^2, mode).
  [[nodiscard]] std::vector<std::pair<ModeIndex, double>> band(double omega_max_sq) const;
};

/// All canonical modes with |m| <= m_max and |n| <= n_max.
[[nodiscard]] ExactSpectrum exact_spectrum(const FieldDirection& b, int m_max, int n_max);

/// Amplitudes over the canonical mode grid, row-aligned with `modes`.
struct AmplitudeTable {
  std::vector<ModeIndex> modes;
  std::vector<double> amplitude;
  /// L2 norm of the projected function.
  double norm = 0.0;
};

/// Amplitude relative to that of a single real Fourier mode of the same L2
/// norm; lies in [0, 1] by Parseval.
[[nodiscard]] double purity(const AmplitudeTable& table, std::size_t k);

/// Fourier moments  int_K phi_k exp(-i(mx+ny)) dV  of every basis function,
/// evaluated separably on the affine cells.
class FourierProjector {
public:
  FourierProjector(const Mesh& mesh, const BasisSpec& basis, int m_max, int n_max);

  [[nodiscard]] const std::vector<ModeIndex>& modes() const { return modes_; }
  [[nodiscard]] std::size_t dof_count() const { return dofs_; }

  /// Complex coefficients c_{m,n} for every canonical mode and every column.
  [[nodiscard]] Eigen::MatrixXcd coefficients(const Matrix& vectors) const;

  /// |c_{m,n}| + |c_{-m,-n}| per canonical mode; for real vectors this is
  /// 2|c_{m,n}| away from (0,0).
  [[nodiscard]] std::vector<AmplitudeTable> amplitudes(const Matrix& vectors) const;
  [[nodiscard]] AmplitudeTable amplitudes(const Vector& v) const;

private:
  struct Shape {
    Vec2 d_xi;
    Vec2 d_eta;
    Eigen::MatrixXcd moments;  // local dof x mode
  };

  std::size_t shape_of(const Cell& cell);

  int m_max_;
  int n_max_;
  int p_xi_;
  int p_eta_;
  std::size_t dofs_ = 0;
  std::vector<ModeIndex> modes_;
  std::vector<Shape> shapes_;
  std::vector<std::size_t> cell_shape_;
  std::vector<double> cell_det_;
  Eigen::MatrixXcd cell_phase_;  // mode x cell, exp(-i k . anchor)
};

/// Per-vector amplitude table for (mesh, basis); throws SolverError on a
/// dimension mismatch.
[[nodiscard]] AmplitudeTable project_to_fourier(const Mesh& mesh, const BasisSpec& basis,
                                                const Vector& eigenvector, int m_max, int n_max);

enum class ErrorKind { relative, absolute, none };
[[nodiscard]] std::string_view to_string(ErrorKind k);

struct AssociatedEigenvalue {
  std::size_t index = 0;
  double omega2 = 0.0;
  std::optional<ModeIndex> mode;  // empty when every amplitude is zero
  double amplitude = 0.0;
  double purity = 0.0;
  std::optional<double> omega2_exact;
  double error = 0.0;
  ErrorKind error_kind = ErrorKind::none;
};

using AssociatedSpectrum = std::vector<AssociatedEigenvalue>;

/// Mode of maximal amplitude; ties go to smaller |m|+|n|, then smaller m.
[[nodiscard]] std::optional<ModeIndex> argmax_mode(const AmplitudeTable& table, double* amplitude = nullptr);

/// Relative error, or absolute when the exact value is zero.
[[nodiscard]] std::pair<double, ErrorKind> eigenvalue_error(double computed, double exact);

/// Associates every eigenpair with its dominant mode. With `exact`, the exact
/// eigenvalue scale * (b1 m + b2 n)^2 and the error are attached; scale is
/// beta^2 / alpha for constant coefficients. An association whose purity is
/// below `min_purity` is rejected: the eigenvector lives outside the
/// searched mode grid.
[[nodiscard]] AssociatedSpectrum associate_modes(const EigenSolution& solution,
                                                 const std::vector<AmplitudeTable>& projections,
                                                 const std::optional<FieldDirection>& exact = {},
                                                 double scale = 1.0, double min_purity = 0.0);

struct BandErrorRow {
  ModeIndex mode;
  double omega2_exact = 0.0;
  double omega2_computed = 0.0;
  double error = 0.0;
  ErrorKind error_kind = ErrorKind::relative;
  int max_mode_number = 0;
};

struct BandErrorReport {
  std::vector<BandErrorRow> rows;  // ordered by (omega2_exact, mode, omega2_computed)
  /// Largest per-mode error, see errors_by_mode.
  double max_error = 0.0;
};

/// Rows whose associated exact eigenvalue lies in [0, omega_max_sq].
[[nodiscard]] BandErrorReport band_error_report(const AssociatedSpectrum& assoc, double omega_max_sq);

/// Error of every band mode: the smallest error among the eigenvalues
/// associated with it, so a stray association cannot mask a resolved mode.
[[nodiscard]] std::map<ModeIndex, double> errors_by_mode(const BandErrorReport& report);

/// Fraction of consecutive decreases of the per-mode-number maximal absolute
/// error |omega2_computed - omega2_exact| when ordered by max(|m|,|n|).
/// Absolute errors are used because the relative error of a near-resonant
/// mode is dominated by its tiny exact eigenvalue. Errors below `floor` are
/// raised to it so roundoff does not count as an inversion.
[[nodiscard]] double trend_inversion_fraction(const BandErrorReport& report, double floor = 1e-12);

/// Least-squares slope of -log(err) against log(dof).
[[nodiscard]] double convergence_slope(const std::vector<double>& dofs, const std::vector<double>& errors);

/// Header `index,omega2_computed,m,n,amplitude,omega2_exact,error,error_kind`,
/// 17 significant digits.
void write_spectrum_csv(std::ostream& os, const AssociatedSpectrum& assoc);

/// Header `m,n,omega2`, ordered by (omega2, m, n).
void write_exact_csv(std::ostream& os, const ExactSpectrum& spec);

} // namespace fadg
