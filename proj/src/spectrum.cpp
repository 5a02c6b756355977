// SPDX-License-Identifier: Apache-2.0
#include "fadg/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <tuple>

#include "fadg/error.hpp"

namespace fadg {

ModeIndex ModeIndex::canonical(int m, int n) {
  if (m > 0 || (m == 0 && n >= 0)) return {m, n};
  return {-m, -n};
}

int ModeIndex::max_abs() const { return std::max(std::abs(m), std::abs(n)); }
int ModeIndex::l1() const { return std::abs(m) + std::abs(n); }

double exact_omega2(const FieldDirection& b, ModeIndex mode) {
  const double k = b.b1 * mode.m + b.b2 * mode.n;
  return k * k;
}

double ExactSpectrum::at(ModeIndex mode) const {
  const auto it = entries.find(ModeIndex::canonical(mode.m, mode.n));
  if (it == entries.end()) throw ConfigError("mode outside the exact spectrum table");
  return it->second;
}

long ExactSpectrum::band_count(double omega_max_sq) const {
  long count = 0;
  for (const auto& [mode, w2] : entries) {
    if (w2 <= omega_max_sq) count += (mode.m == 0 && mode.n == 0) ? 1 : 2;
  }
  return count;
}

std::vector<std::pair<ModeIndex, double>> ExactSpectrum::band(double omega_max_sq) const {
  std::vector<std::pair<ModeIndex, double>> out;
  for (const auto& [mode, w2] : entries) {
    if (w2 <= omega_max_sq) out.emplace_back(mode, w2);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& x, const auto& y) { return x.second < y.second; });
  return out;
}

ExactSpectrum exact_spectrum(const FieldDirection& b, int m_max, int n_max) {
  if (m_max < 0 || n_max < 0) throw ConfigError("mode bounds must be >= 0");
  b.validate();
  ExactSpectrum s;
  s.m_max = m_max;
  s.n_max = n_max;
  for (int m = 0; m <= m_max; ++m) {
    for (int n = (m == 0 ? 0 : -n_max); n <= n_max; ++n) {
      s.entries.emplace(ModeIndex{m, n}, exact_omega2(b, {m, n}));
    }
  }
  return s;
}

namespace {

/// I_a(kappa) = int_{-1}^{1} P_a(t) exp(-i kappa (t + 1)) dt, a = 0..p.
std::vector<std::complex<double>> legendre_moments(int p, double kappa, const QuadratureRule& q) {
  std::vector<std::complex<double>> out(static_cast<std::size_t>(p + 1), 0.0);
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double t = q.nodes[k];
    const std::complex<double> e = std::polar(q.weights[k], -kappa * (t + 1.0));
    const auto lv = legendre_basis_eval(p, t);
    for (int a = 0; a <= p; ++a) out[static_cast<std::size_t>(a)] += lv.values[static_cast<std::size_t>(a)] * e;
  }
  return out;
}

} // namespace

FourierProjector::FourierProjector(const Mesh& mesh, const BasisSpec& basis, int m_max, int n_max)
    : m_max_(m_max), n_max_(n_max), p_xi_(basis.p_xi), p_eta_(basis.p_eta) {
  basis.validate();
  if (m_max < 0 || n_max < 0) throw ConfigError("mode bounds must be >= 0");
  for (int m = 0; m <= m_max; ++m) {
    for (int n = (m == 0 ? 0 : -n_max); n <= n_max; ++n) modes_.push_back({m, n});
  }
  const auto nc = mesh.num_cells();
  dofs_ = nc * static_cast<std::size_t>(basis.local_dim());
  cell_shape_.resize(nc);
  cell_det_.resize(nc);
  cell_phase_.resize(static_cast<Eigen::Index>(modes_.size()), static_cast<Eigen::Index>(nc));
  for (std::size_t c = 0; c < nc; ++c) {
    const Cell& cell = mesh.cells()[c];
    cell_shape_[c] = shape_of(cell);
    cell_det_[c] = cell.jacobian_det();
    for (std::size_t k = 0; k < modes_.size(); ++k) {
      const double ph = modes_[k].m * cell.anchor.x() + modes_[k].n * cell.anchor.y();
      cell_phase_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = std::polar(1.0, -ph);
    }
  }
}

std::size_t FourierProjector::shape_of(const Cell& cell) {
  for (std::size_t s = 0; s < shapes_.size(); ++s) {
    if (shapes_[s].d_xi == cell.d_xi && shapes_[s].d_eta == cell.d_eta) return s;
  }
  Shape sh{cell.d_xi, cell.d_eta, {}};
  const int ld = (p_xi_ + 1) * (p_eta_ + 1);
  sh.moments.resize(ld, static_cast<Eigen::Index>(modes_.size()));
  double kmax = 0.0;
  for (const auto& md : modes_) {
    kmax = std::max({kmax, std::abs(md.m * cell.d_xi.x() + md.n * cell.d_xi.y()),
                     std::abs(md.m * cell.d_eta.x() + md.n * cell.d_eta.y())});
  }
  const int pts = static_cast<int>(std::ceil((std::max(p_xi_, p_eta_) + kmax) / 2.0)) + 8;
  const QuadratureRule q = gauss_rule(pts);
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    const auto& md = modes_[k];
    const auto ix = legendre_moments(p_xi_, md.m * cell.d_xi.x() + md.n * cell.d_xi.y(), q);
    const auto ie = legendre_moments(p_eta_, md.m * cell.d_eta.x() + md.n * cell.d_eta.y(), q);
    for (int a = 0; a <= p_xi_; ++a) {
      for (int b = 0; b <= p_eta_; ++b) {
        sh.moments(a * (p_eta_ + 1) + b, static_cast<Eigen::Index>(k)) =
            ix[static_cast<std::size_t>(a)] * ie[static_cast<std::size_t>(b)];
      }
    }
  }
  shapes_.push_back(std::move(sh));
  return shapes_.size() - 1;
}

Eigen::MatrixXcd FourierProjector::coefficients(const Matrix& vectors) const {
  if (static_cast<std::size_t>(vectors.rows()) != dofs_) {
    throw SolverError("eigenvector length " + std::to_string(vectors.rows()) +
                      " does not match DoF count " + std::to_string(dofs_));
  }
  const auto nm = static_cast<Eigen::Index>(modes_.size());
  const Eigen::Index nv = vectors.cols();
  const int ld = (p_xi_ + 1) * (p_eta_ + 1);
  std::vector<Matrix> re_t;
  std::vector<Matrix> im_t;
  for (const auto& sh : shapes_) {
    re_t.push_back(sh.moments.real().transpose());
    im_t.push_back(sh.moments.imag().transpose());
  }
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(nm, nv);
  Matrix tr(nm, nv);
  Matrix ti(nm, nv);
  for (std::size_t c = 0; c < cell_shape_.size(); ++c) {
    const auto blk = vectors.middleRows(static_cast<Eigen::Index>(c) * ld, ld);
    tr.noalias() = re_t[cell_shape_[c]] * blk;
    ti.noalias() = im_t[cell_shape_[c]] * blk;
    for (Eigen::Index k = 0; k < nm; ++k) {
      const std::complex<double> f = cell_det_[c] * cell_phase_(k, static_cast<Eigen::Index>(c));
      for (Eigen::Index v = 0; v < nv; ++v) out(k, v) += f * std::complex<double>(tr(k, v), ti(k, v));
    }
  }
  return out;
}

std::vector<AmplitudeTable> FourierProjector::amplitudes(const Matrix& vectors) const {
  const Eigen::MatrixXcd c = coefficients(vectors);
  // Legendre orthogonality: int P_a P_b = 2 / (2a + 1) delta_ab.
  const int ld = (p_xi_ + 1) * (p_eta_ + 1);
  Vector gram(ld);
  for (int a = 0; a <= p_xi_; ++a) {
    for (int b = 0; b <= p_eta_; ++b) gram[a * (p_eta_ + 1) + b] = 4.0 / ((2 * a + 1) * (2 * b + 1));
  }
  std::vector<double> norms(static_cast<std::size_t>(vectors.cols()), 0.0);
  for (std::size_t cell = 0; cell < cell_det_.size(); ++cell) {
    const auto blk = vectors.middleRows(static_cast<Eigen::Index>(cell) * ld, ld);
    for (Eigen::Index v = 0; v < vectors.cols(); ++v) {
      norms[static_cast<std::size_t>(v)] += cell_det_[cell] * blk.col(v).cwiseAbs2().dot(gram);
    }
  }
  for (double& n : norms) n = std::sqrt(n);
  std::vector<AmplitudeTable> out(static_cast<std::size_t>(vectors.cols()));
  for (Eigen::Index v = 0; v < vectors.cols(); ++v) {
    auto& t = out[static_cast<std::size_t>(v)];
    t.modes = modes_;
    t.norm = norms[static_cast<std::size_t>(v)];
    t.amplitude.resize(modes_.size());
    for (std::size_t k = 0; k < modes_.size(); ++k) {
      const double mag = std::abs(c(static_cast<Eigen::Index>(k), v));
      const bool zero_mode = modes_[k].m == 0 && modes_[k].n == 0;
      // Real vectors: c_{-m,-n} is the conjugate of c_{m,n}.
      t.amplitude[k] = zero_mode ? mag : 2.0 * mag;
    }
  }
  return out;
}

AmplitudeTable FourierProjector::amplitudes(const Vector& v) const {
  Matrix m = v;
  return amplitudes(m).front();
}

AmplitudeTable project_to_fourier(const Mesh& mesh, const BasisSpec& basis,
                                  const Vector& eigenvector, int m_max, int n_max) {
  return FourierProjector(mesh, basis, m_max, n_max).amplitudes(eigenvector);
}

std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::relative: return "relative";
    case ErrorKind::absolute: return "absolute";
    case ErrorKind::none: return "none";
  }
  return "none";
}

std::optional<ModeIndex> argmax_mode(const AmplitudeTable& table, double* amplitude) {
  double best = 0.0;
  for (double a : table.amplitude) best = std::max(best, a);
  if (amplitude) *amplitude = best;
  if (!(best > 0.0)) return std::nullopt;
  const double tie = best * (1.0 - 1e-12);
  std::optional<ModeIndex> pick;
  for (std::size_t k = 0; k < table.modes.size(); ++k) {
    if (table.amplitude[k] < tie) continue;
    const ModeIndex& md = table.modes[k];
    if (!pick || std::make_tuple(md.l1(), md.m) < std::make_tuple(pick->l1(), pick->m)) {
      pick = md;
      if (amplitude) *amplitude = table.amplitude[k];
    }
  }
  return pick;
}

std::pair<double, ErrorKind> eigenvalue_error(double computed, double exact) {
  if (exact == 0.0) return {std::abs(computed), ErrorKind::absolute};
  return {std::abs(computed - exact) / std::abs(exact), ErrorKind::relative};
}

double purity(const AmplitudeTable& table, std::size_t k) {
  if (!(table.norm > 0.0)) return 0.0;
  const ModeIndex& md = table.modes[k];
  // Reference amplitudes: 2 pi |phi| for the constant, 2 sqrt(2) pi |phi| for cos(k.x).
  const double ref = (md.m == 0 && md.n == 0 ? 1.0 : std::sqrt(2.0)) * kTwoPi * table.norm;
  return table.amplitude[k] / ref;
}

AssociatedSpectrum associate_modes(const EigenSolution& solution,
                                   const std::vector<AmplitudeTable>& projections,
                                   const std::optional<FieldDirection>& exact, double scale,
                                   double min_purity) {
  if (projections.size() != solution.size()) {
    throw SolverError("projection count does not match eigenpair count");
  }
  AssociatedSpectrum out(solution.size());
  for (std::size_t i = 0; i < solution.size(); ++i) {
    auto& row = out[i];
    row.index = i;
    row.omega2 = solution.eigenvalues[static_cast<Eigen::Index>(i)];
    row.mode = argmax_mode(projections[i], &row.amplitude);
    if (row.mode) {
      const auto& t = projections[i];
      const auto k = static_cast<std::size_t>(
          std::find(t.modes.begin(), t.modes.end(), *row.mode) - t.modes.begin());
      row.purity = purity(t, k);
      if (row.purity < min_purity) row.mode.reset();
    }
    if (row.mode && exact) {
      row.omega2_exact = scale * exact_omega2(*exact, *row.mode);
      std::tie(row.error, row.error_kind) = eigenvalue_error(row.omega2, *row.omega2_exact);
    }
  }
  return out;
}

BandErrorReport band_error_report(const AssociatedSpectrum& assoc, double omega_max_sq) {
  BandErrorReport rep;
  for (const auto& a : assoc) {
    if (!a.mode || !a.omega2_exact || *a.omega2_exact > omega_max_sq) continue;
    rep.rows.push_back({*a.mode, *a.omega2_exact, a.omega2, a.error, a.error_kind, a.mode->max_abs()});
  }
  std::stable_sort(rep.rows.begin(), rep.rows.end(), [](const BandErrorRow& x, const BandErrorRow& y) {
    return std::tie(x.omega2_exact, x.mode, x.omega2_computed) <
           std::tie(y.omega2_exact, y.mode, y.omega2_computed);
  });
  for (const auto& [mode, err] : errors_by_mode(rep)) rep.max_error = std::max(rep.max_error, err);
  return rep;
}

std::map<ModeIndex, double> errors_by_mode(const BandErrorReport& report) {
  std::map<ModeIndex, double> out;
  for (const auto& r : report.rows) {
    auto [it, inserted] = out.try_emplace(r.mode, r.error);
    if (!inserted) it->second = std::min(it->second, r.error);
  }
  return out;
}

double trend_inversion_fraction(const BandErrorReport& report, double floor) {
  std::map<int, double> by_number;
  for (const auto& r : report.rows) {
    const double err = std::max(std::abs(r.omega2_computed - r.omega2_exact), floor);
    auto [it, inserted] = by_number.try_emplace(r.max_mode_number, err);
    if (!inserted) it->second = std::max(it->second, err);
  }
  if (by_number.size() < 2) return 0.0;
  int inversions = 0;
  auto prev = by_number.begin();
  for (auto it = std::next(prev); it != by_number.end(); ++it, ++prev) {
    if (it->second < prev->second) ++inversions;
  }
  return static_cast<double>(inversions) / static_cast<double>(by_number.size() - 1);
}

double convergence_slope(const std::vector<double>& dofs, const std::vector<double>& errors) {
  if (dofs.size() != errors.size() || dofs.size() < 2) {
    throw ConfigError("convergence slope needs at least two levels");
  }
  const auto n = static_cast<double>(dofs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    const double x = std::log(dofs[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return 0.0;
  return -(n * sxy - sx * sy) / den;
}

void write_spectrum_csv(std::ostream& os, const AssociatedSpectrum& assoc) {
  const auto prec = os.precision();
  os << std::setprecision(17);
  os << "index,omega2_computed,m,n,amplitude,omega2_exact,error,error_kind\n";
  for (const auto& a : assoc) {
    os << a.index << ',' << a.omega2 << ',';
    if (a.mode) os << a.mode->m << ',' << a.mode->n;
    else os << ',';
    os << ',' << a.amplitude << ',';
    if (a.omega2_exact) os << *a.omega2_exact << ',' << a.error;
    else os << ',';
    os << ',' << to_string(a.error_kind) << '\n';
  }
  os.precision(prec);
}

void write_exact_csv(std::ostream& os, const ExactSpectrum& spec) {
  std::vector<std::pair<ModeIndex, double>> rows(spec.entries.begin(), spec.entries.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& x, const auto& y) { return x.second < y.second; });
  const auto prec = os.precision();
  os << std::setprecision(17) << "m,n,omega2\n";
  for (const auto& [mode, w2] : rows) os << mode.m << ',' << mode.n << ',' << w2 << '\n';
  os.precision(prec);
}

} // namespace fadg
