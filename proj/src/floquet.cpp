#include "floquet/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "floquet/dynamics.hpp"
#include "floquet/experiment.hpp"
#include "floquet/numeric.hpp"

namespace floquet {

namespace {

void require_single_tone(const DriveParamsd& p, const char* op) {
  if (p.modulated())
    throw Error(ErrorKind::PreconditionViolated, std::string(op) + " requires an unmodulated drive");
}

void require_order(int m) {
  if (m < 1) throw Error(ErrorKind::PreconditionViolated, "resonance order m must be >= 1");
}

DriveParamsd at_frequency(DriveParamsd p, double omega) {
  p.omega = omega;
  return p;
}

struct MonodromyEigen {
  std::array<double, 2> eps;
  std::array<SpinStated, 2> vectors;
  bool degenerate;
};

MonodromyEigen diagonalize(const Matrix2cd& u, double period, double omega) {
  Eigen::ComplexEigenSolver<Matrix2cd> solver(u);
  MonodromyEigen out{};
  for (int k = 0; k < 2; ++k) {
    out.eps[static_cast<std::size_t>(k)] = fold_quasienergy(-std::arg(solver.eigenvalues()(k)) / period, omega);
    out.vectors[static_cast<std::size_t>(k)] = solver.eigenvectors().col(k).normalized();
  }
  const std::complex<double> ratio = solver.eigenvalues()(0) / solver.eigenvalues()(1);
  out.degenerate = std::abs(std::arg(ratio)) < 1e-12;
  // Unitary eigenvectors are orthogonal; re-orthogonalize the second against
  // rounding, or pick the complement outright in the degenerate case.
  SpinStated& a = out.vectors[0];
  SpinStated& b = out.vectors[1];
  b -= a.dot(b) * a;
  if (b.norm() < 1e-8) b = SpinStated(-std::conj(a(1)), std::conj(a(0)));
  b.normalize();
  return out;
}

}  // namespace

EigenBasis eigenbasis(const DriveParamsd& p) {
  const double omega0 = p.omega0();
  if (!(omega0 > 0)) throw Error(ErrorKind::DegenerateSystem, "delta_z = delta_x = 0, mixing angle undefined");
  EigenBasis b;
  b.omega0 = omega0;
  b.theta = std::atan2(p.delta_x, p.delta_z);
  const double c = std::cos(b.theta / 2);
  const double s = std::sin(b.theta / 2);
  b.plus = SpinStated(c, s);
  b.minus = SpinStated(-s, c);
  return b;
}

double fold_quasienergy(double eps, double omega) {
  double folded = eps - omega * std::floor((eps + omega / 2) / omega);
  // floor rounding can land exactly on +omega/2
  if (folded >= omega / 2) folded -= omega;
  return folded;
}

double quasienergy_distance(double a, double b, double omega) {
  const double d = std::fmod(std::abs(a - b), omega);
  return std::min(d, omega - d);
}

FloquetSpectrum floquet_spectrum(const DriveParamsd& p, double tol, int n_samples, double t_start) {
  validate(p);
  require_single_tone(p, "floquet_spectrum");
  if (n_samples < 1) throw Error(ErrorKind::PreconditionViolated, "n_samples must be >= 1");

  FloquetSpectrum result;
  result.period = kTwoPi / p.omega;
  result.t_start = t_start;
  const auto ctl = default_step_control(p, tol);
  auto ham = [&p](double t) { return rotating_frame_matrix(p, t); };

  std::vector<Matrix2cd> partial(static_cast<std::size_t>(n_samples) + 1, Matrix2cd::Identity());
  result.sample_times.resize(partial.size());
  result.sample_times[0] = t_start;
  for (int k = 1; k <= n_samples; ++k) {
    const double a = t_start + result.period * (k - 1) / n_samples;
    const double b = t_start + result.period * k / n_samples;
    partial[static_cast<std::size_t>(k)] = evolve_adaptive<double>(ham, a, b, ctl) * partial[static_cast<std::size_t>(k - 1)];
    result.sample_times[static_cast<std::size_t>(k)] = b;
  }
  result.monodromy = partial.back();

  const MonodromyEigen eig = diagonalize(result.monodromy, result.period, p.omega);
  result.quasienergies = eig.eps;
  result.degenerate = eig.degenerate;
  for (double e : result.quasienergies) {
    if (std::abs(std::abs(e) - p.omega / 2) < 1e-9 * p.omega) result.at_zone_edge = true;
  }

  result.modes.resize(partial.size());
  for (std::size_t k = 0; k < partial.size(); ++k) {
    const double dt = result.sample_times[k] - t_start;
    for (std::size_t s = 0; s < 2; ++s) {
      result.modes[k][s] = std::polar(1.0, eig.eps[s] * dt) * (partial[k] * eig.vectors[s]);
    }
  }
  return result;
}

std::array<double, 2> quasienergies(const DriveParamsd& p, double tol) {
  validate(p);
  require_single_tone(p, "quasienergies");
  const double period = kTwoPi / p.omega;
  const Matrix2cd u = propagate_unitary(p, 0.0, period, tol).u;
  return diagonalize(u, period, p.omega).eps;
}

std::vector<std::array<double, 2>> track_quasienergies(const DriveParamsd& base,
                                                       std::span<const double> omegas, double tol) {
  std::vector<std::array<double, 2>> out;
  out.reserve(omegas.size());
  std::array<SpinStated, 2> previous;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const DriveParamsd p = at_frequency(base, omegas[i]);
    validate(p);
    require_single_tone(p, "track_quasienergies");
    const double period = kTwoPi / p.omega;
    MonodromyEigen eig = diagonalize(propagate_unitary(p, 0.0, period, tol).u, period, p.omega);
    if (i == 0) {
      if (eig.eps[0] < eig.eps[1]) {
        std::swap(eig.eps[0], eig.eps[1]);
        std::swap(eig.vectors[0], eig.vectors[1]);
      }
    } else {
      const double keep = std::abs(previous[0].dot(eig.vectors[0])) + std::abs(previous[1].dot(eig.vectors[1]));
      const double swap = std::abs(previous[0].dot(eig.vectors[1])) + std::abs(previous[1].dot(eig.vectors[0]));
      if (swap > keep) {
        std::swap(eig.eps[0], eig.eps[1]);
        std::swap(eig.vectors[0], eig.vectors[1]);
      }
    }
    previous = eig.vectors;
    out.push_back(eig.eps);
  }
  return out;
}

Eigen::Index LadderModel::index(int band, int n) const {
  if (n < n_min || n > n_max || (band != 1 && band != -1))
    throw Error(ErrorKind::PreconditionViolated, "ladder level outside truncation");
  return 2 * (n - n_min) + (band == 1 ? 0 : 1);
}

Eigen::MatrixXcd LadderModel::hamiltonian() const {
  Eigen::MatrixXcd h = couplings;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    h(k, k) += levels[i].energy;
  }
  return h;
}

LadderModel ladder_model(const DriveParamsd& p, int n_min, int n_max) {
  validate(p);
  require_single_tone(p, "ladder_model");
  if (n_max - n_min < 2) throw Error(ErrorKind::PreconditionViolated, "ladder needs n_max - n_min >= 2");
  const EigenBasis basis = eigenbasis(p);

  LadderModel model;
  model.n_min = n_min;
  model.n_max = n_max;
  for (int n = n_min; n <= n_max; ++n) {
    model.levels.push_back({1, n, basis.omega0 / 2 + n * p.omega});
    model.levels.push_back({-1, n, -basis.omega0 / 2 + n * p.omega});
  }

  // sigma_x in the {|+>, |->} basis
  Eigen::Matrix2d sx_band;
  sx_band << std::sin(basis.theta), std::cos(basis.theta), std::cos(basis.theta), -std::sin(basis.theta);
  // A sin(wt) sx = (A / 2i)(e^{iwt} - e^{-iwt}) sx: rung n couples to n-1 through -(iA/2) sx
  const std::complex<double> down(0, -p.amp_a / 2);

  const auto dim = static_cast<Eigen::Index>(model.levels.size());
  model.couplings = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = n_min + 1; n <= n_max; ++n) {
    const Eigen::Index r = 2 * (n - n_min);
    const Eigen::Index c = 2 * (n - 1 - n_min);
    const Eigen::Matrix2cd block = down * sx_band.cast<std::complex<double>>();
    model.couplings.block(r, c, 2, 2) = block;
    model.couplings.block(c, r, 2, 2) = block.adjoint();
  }
  return model;
}

double resonance_frequency(const DriveParamsd& p, int m) {
  require_order(m);
  return eigenbasis(p).omega0 / m;
}

double ladder_pair_splitting(const DriveParamsd& p, int m, int n_min, int n_max) {
  require_order(m);
  const LadderModel model = ladder_model(p, n_min, n_max);
  // pair centered in the truncation so both see the same number of rungs
  const int n_pair = static_cast<int>(std::floor((n_min + n_max - m) / 2.0));
  if (n_pair < n_min || n_pair + m > n_max)
    throw Error(ErrorKind::PreconditionViolated, "ladder truncation too small for this order");
  const Eigen::Index upper = model.index(1, n_pair);
  const Eigen::Index lower = model.index(-1, n_pair + m);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(model.hamiltonian());
  const auto& vecs = solver.eigenvectors();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(vecs.cols()));
  std::iota(order.begin(), order.end(), 0);
  auto weight = [&](Eigen::Index k) { return std::norm(vecs(upper, k)) + std::norm(vecs(lower, k)); };
  std::partial_sort(order.begin(), order.begin() + 2, order.end(),
                    [&](Eigen::Index a, Eigen::Index b) { return weight(a) > weight(b); });
  return std::abs(solver.eigenvalues()(order[0]) - solver.eigenvalues()(order[1]));
}

GapMinimum quasienergy_gap_minimum(const DriveParamsd& p, int m, double search_width) {
  const double center = resonance_frequency(p, m);
  if (!(search_width > 0) || !(center - search_width > 0))
    throw Error(ErrorKind::PreconditionViolated, "search window must be positive and inside omega > 0");
  auto gap = [&](double omega) {
    const auto eps = quasienergies(at_frequency(p, omega));
    return quasienergy_distance(eps[0], eps[1], omega);
  };
  const Extremum best = bracketed_minimize(gap, center - search_width, center + search_width, 41,
                                           1e-7 * p.omega0());
  return {best.x, best.value};
}

GapMinimum ladder_gap_minimum(const DriveParamsd& p, int m, double search_width, int n_min, int n_max) {
  const double center = resonance_frequency(p, m);
  if (!(search_width > 0) || !(center - search_width > 0))
    throw Error(ErrorKind::PreconditionViolated, "search window must be positive and inside omega > 0");
  auto split = [&](double omega) { return ladder_pair_splitting(at_frequency(p, omega), m, n_min, n_max); };
  const Extremum best = bracketed_minimize(split, center - search_width, center + search_width, 41,
                                           1e-7 * p.omega0());
  return {best.x, best.value};
}

double resonance_locate(const DriveParamsd& p, int m, double search_width) {
  validate(p);
  require_single_tone(p, "resonance_locate");
  const double omega0 = eigenbasis(p).omega0;
  const double center = resonance_frequency(p, m);
  const double lo = center - search_width;
  const double hi = center + search_width;

  // The spectral avoided crossing seeds the bracket; contrast defines the answer.
  if (p.amp_a == 0) throw Error(ErrorKind::NoPeakFound, "no inter-band transfer without a drive");
  const GapMinimum seed = quasienergy_gap_minimum(p, m, search_width);
  if (!(seed.gap > 1e-9 * omega0)) throw Error(ErrorKind::NoPeakFound, "no inter-band transfer (zero Raman coupling)");
  const double window = 3.0 * kTwoPi / seed.gap;
  auto contrast = [&](double omega) { return transfer_contrast(at_frequency(p, omega), window); };

  // Transfer is Lorentzian in omega with half width gap / m.
  const double half = 2.0 * seed.gap / m;
  const double a = std::max(lo, seed.omega - half);
  const double b = std::min(hi, seed.omega + half);
  const Extremum peak = golden_section_maximize(contrast, a, b, 1e-4 * omega0);

  const double floor_value = std::min({contrast(lo), contrast(hi), contrast(a), contrast(b)});
  if (peak.value - floor_value < 0.01)
    throw Error(ErrorKind::NoPeakFound, "transfer contrast is flat across the search window");
  return peak.x;
}

double raman_rabi_frequency(const DriveParamsd& p, int m, RabiMethod method) {
  validate(p);
  require_single_tone(p, "raman_rabi_frequency");
  const double center = resonance_frequency(p, m);
  if (std::abs(p.omega - center) > 0.2 * center)
    throw Error(ErrorKind::NotNearResonance, "drive frequency is more than 20% from omega0/m");
  if (p.amp_a == 0) return 0.0;
  const double width = 0.1 * center;
  switch (method) {
    case RabiMethod::Ladder:
      return ladder_gap_minimum(p, m, width).gap;
    case RabiMethod::QuasienergyGap:
      return quasienergy_gap_minimum(p, m, width).gap;
    case RabiMethod::TimeFit: {
      const double omega_r = resonance_locate(p, m, width);
      const DriveParamsd at_res = at_frequency(p, omega_r);
      const auto eps = quasienergies(at_res);
      return fit_raman_frequency(at_res, quasienergy_distance(eps[0], eps[1], omega_r)).omega_f;
    }
  }
  return 0.0;
}

double adiabaticity_parameter(const DriveParamsd& p) {
  const EigenBasis b = eigenbasis(p);
  // d/dt sin(phi) peaks at max |phi'| = omega + |a| for a modulated carrier
  const double rate = p.omega + std::abs(p.phase_mod_a);
  return p.amp_a * rate * std::abs(std::cos(b.theta)) / (b.omega0 * b.omega0);
}

}  // namespace floquet
