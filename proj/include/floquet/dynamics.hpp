#ifndef FLOQUET_DYNAMICS_HPP
#define FLOQUET_DYNAMICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "floquet/types.hpp"

namespace floquet {

template <typename Scalar>
Matrix2c<Scalar> sigma_x() {
  Matrix2c<Scalar> m;
  m << 0, 1, 1, 0;
  return m;
}

template <typename Scalar>
Matrix2c<Scalar> sigma_y() {
  using C = std::complex<Scalar>;
  Matrix2c<Scalar> m;
  m << C(0), C(0, -1), C(0, 1), C(0);
  return m;
}

template <typename Scalar>
Matrix2c<Scalar> sigma_z() {
  Matrix2c<Scalar> m;
  m << 1, 0, 0, -1;
  return m;
}

/// Carrier phase of the weak drive; reduces to w t without modulation.
template <typename Scalar>
Scalar drive_phase(const DriveParams<Scalar>& p, Scalar t) {
  using std::sin;
  Scalar phase = p.omega * t;
  if (p.modulated()) phase += (p.phase_mod_a / p.phase_mod_nu) * sin(p.phase_mod_nu * t);
  return phase;
}

/// Builds (dz/2) sz + (dx/2 + envelope) sx directly, skipping the precondition check.
template <typename Scalar>
Matrix2c<Scalar> rotating_frame_matrix(const DriveParams<Scalar>& p, Scalar t) {
  using std::sin;
  const Scalar x = p.delta_x / 2 + p.amp_a * sin(drive_phase(p, t));
  const Scalar z = p.delta_z / 2;
  Matrix2c<Scalar> h;
  h << z, x, x, -z;
  return h;
}

template <typename Scalar>
HamiltonianSample<Scalar> hamiltonian_at(const DriveParams<Scalar>& p, Scalar t) {
  if (!(t >= 0)) throw Error(ErrorKind::PreconditionViolated, "hamiltonian_at requires t >= 0");
  return {rotating_frame_matrix(p, t), t};
}

/// exp(-i h) for Hermitian 2x2 h, in closed form. Exactly unitary up to rounding.
template <typename Scalar>
Matrix2c<Scalar> exp_hermitian(const Matrix2c<Scalar>& h) {
  using C = std::complex<Scalar>;
  using std::cos;
  using std::sin;
  using std::sqrt;
  const Scalar h0 = (h(0, 0).real() + h(1, 1).real()) / 2;
  const Scalar nx = (h(0, 1).real() + h(1, 0).real()) / 2;
  const Scalar ny = (h(1, 0).imag() - h(0, 1).imag()) / 2;
  const Scalar nz = (h(0, 0).real() - h(1, 1).real()) / 2;
  const Scalar r = sqrt(nx * nx + ny * ny + nz * nz);
  const Scalar c = cos(r);
  // sin(r)/r, series near zero
  const Scalar s = r > Scalar(1e-4) ? sin(r) / r : Scalar(1) - r * r / 6 + r * r * r * r / 120;
  const C minus_i(0, -1);
  Matrix2c<Scalar> u;
  u(0, 0) = C(c, 0) + minus_i * s * nz;
  u(1, 1) = C(c, 0) - minus_i * s * nz;
  u(0, 1) = minus_i * s * C(nx, -ny);
  u(1, 0) = minus_i * s * C(nx, ny);
  return std::polar(Scalar(1), -h0) * u;
}

/// One fourth-order Magnus step (two Gauss-Legendre nodes) over [t, t+h].
/// The step generator is constant, so each substep is an exact exponential.
template <typename Scalar, typename HamFn>
Matrix2c<Scalar> magnus4_step(HamFn&& ham, Scalar t, Scalar h) {
  using C = std::complex<Scalar>;
  const Scalar sqrt3 = std::sqrt(Scalar(3));
  const Scalar offset = sqrt3 / 6;
  const Matrix2c<Scalar> h1 = ham(t + (Scalar(0.5) - offset) * h);
  const Matrix2c<Scalar> h2 = ham(t + (Scalar(0.5) + offset) * h);
  const Matrix2c<Scalar> comm = h2 * h1 - h1 * h2;
  const Matrix2c<Scalar> generator = (h / 2) * (h1 + h2) - C(0, sqrt3 / 12 * h * h) * comm;
  return exp_hermitian<Scalar>(generator);
}

inline constexpr int kMagnusOrder = 4;

/// Product of `steps` equal Magnus substeps over [t0, t1].
template <typename Scalar, typename HamFn>
Matrix2c<Scalar> evolve_fixed(HamFn&& ham, Scalar t0, Scalar t1, std::int64_t steps) {
  Matrix2c<Scalar> u = Matrix2c<Scalar>::Identity();
  if (t1 == t0) return u;
  const Scalar h = (t1 - t0) / static_cast<Scalar>(steps);
  for (std::int64_t k = 0; k < steps; ++k) {
    u = magnus4_step<Scalar>(ham, t0 + static_cast<Scalar>(k) * h, h) * u;
  }
  return u;
}

template <typename Scalar>
struct StepControl {
  Scalar tol{1e-8};       ///< bound on population change under step halving
  Scalar max_step{0};     ///< largest substep; must be > 0
  Scalar min_step{0};     ///< below this the parameters are deemed pathological
};

/// Step-doubling control: refine until halving the substep moves any
/// population by less than ctl.tol. Returns the finer result.
template <typename Scalar, typename HamFn>
Matrix2c<Scalar> evolve_adaptive(HamFn&& ham, Scalar t0, Scalar t1, const StepControl<Scalar>& ctl) {
  using std::ceil;
  if (t1 == t0) return Matrix2c<Scalar>::Identity();
  const Scalar span = t1 - t0;
  std::int64_t n = std::max<std::int64_t>(1, static_cast<std::int64_t>(ceil(span / ctl.max_step)));
  Matrix2c<Scalar> coarse = evolve_fixed<Scalar>(ham, t0, t1, n);
  while (true) {
    if (span / static_cast<Scalar>(2 * n) < ctl.min_step)
      throw Error(ErrorKind::StepUnderflow, "required substep below minimum step");
    Matrix2c<Scalar> fine = evolve_fixed<Scalar>(ham, t0, t1, 2 * n);
    // |(|a|^2 - |b|^2)| <= 2 |a - b| for unit-bounded amplitudes
    const Scalar change = 2 * (fine - coarse).cwiseAbs().maxCoeff();
    if (change < ctl.tol) return fine;
    coarse = fine;
    n *= 2;
  }
}

/// Default substep: 1/64 of the fastest intrinsic period of the drive.
template <typename Scalar>
Scalar default_max_step(const DriveParams<Scalar>& p) {
  using std::abs;
  Scalar fastest = std::max({p.omega + abs(p.phase_mod_a), p.omega0(), abs(p.phase_mod_nu)});
  return Scalar(kTwoPi) / (64 * fastest);
}

template <typename Scalar>
StepControl<Scalar> default_step_control(const DriveParams<Scalar>& p, Scalar tol) {
  return {tol, default_max_step(p), Scalar(1e-6) / p.omega};
}

namespace detail {
template <typename Scalar>
void check_interval(Scalar t0, Scalar t1, Scalar tol) {
  if (!(t0 >= 0) || !(t1 >= t0))
    throw Error(ErrorKind::PreconditionViolated, "propagation requires 0 <= t0 <= t1");
  if (!(tol > 0)) throw Error(ErrorKind::PreconditionViolated, "tol must be positive");
}
}  // namespace detail

template <typename Scalar>
Propagator<Scalar> propagate_unitary(const DriveParams<Scalar>& p, Scalar t0, Scalar t1,
                                     Scalar tol = Scalar(1e-8)) {
  validate(p);
  detail::check_interval(t0, t1, tol);
  auto ham = [&p](Scalar t) { return rotating_frame_matrix(p, t); };
  return {evolve_adaptive<Scalar>(ham, t0, t1, default_step_control(p, tol)), t0, t1};
}

template <typename Scalar>
SpinState<Scalar> propagate_state(const SpinState<Scalar>& psi, const DriveParams<Scalar>& p,
                                  Scalar t0, Scalar t1, Scalar tol = Scalar(1e-8)) {
  return propagate_unitary(p, t0, t1, tol).u * psi;
}

/// Lab-frame Hamiltonian (dE/2) sz + V(t) sx with dE = dz + w_d and
/// V(t) = dx cos(w_d t) + 2 A cos(w_d t) sin(phi(t)).
template <typename Scalar>
Matrix2c<Scalar> lab_frame_matrix(const DriveParams<Scalar>& p, Scalar omega_d, Scalar t) {
  using std::cos;
  using std::sin;
  const Scalar carrier = cos(omega_d * t);
  const Scalar v = p.delta_x * carrier + 2 * p.amp_a * carrier * sin(drive_phase(p, t));
  const Scalar z = (p.delta_z + omega_d) / 2;
  Matrix2c<Scalar> h;
  h << z, v, v, -z;
  return h;
}

/// Largest |P0_lab(t) - P0_rot(t)| over [0, t1] starting from |0>. The frame
/// change is a sz rotation, so |0> populations are directly comparable.
template <typename Scalar>
Scalar lab_frame_check(const DriveParams<Scalar>& p, Scalar omega_d, Scalar t1,
                       Scalar tol = Scalar(1e-9)) {
  validate(p);
  detail::check_interval(Scalar(0), t1, tol);
  if (omega_d < 50 * p.omega0())
    throw Error(ErrorKind::PreconditionViolated, "omega_d must be at least 50 * omega0");

  auto lab = [&](Scalar t) { return lab_frame_matrix(p, omega_d, t); };
  auto rot = [&](Scalar t) { return rotating_frame_matrix(p, t); };
  const Scalar lab_step = Scalar(kTwoPi) / (64 * (omega_d + p.omega0()));
  const StepControl<Scalar> lab_ctl{tol, lab_step, lab_step * Scalar(1e-6)};
  const StepControl<Scalar> rot_ctl = default_step_control(p, tol);

  const Scalar sample_dt = Scalar(kTwoPi) / (16 * omega_d);
  const auto samples = static_cast<std::int64_t>(std::ceil(t1 / sample_dt));
  SpinState<Scalar> psi_lab = ket_zero<Scalar>();
  SpinState<Scalar> psi_rot = ket_zero<Scalar>();
  Scalar residual = 0;
  Scalar t = 0;
  for (std::int64_t k = 1; k <= samples; ++k) {
    const Scalar next = std::min(t1, static_cast<Scalar>(k) * sample_dt);
    psi_lab = evolve_adaptive<Scalar>(lab, t, next, lab_ctl) * psi_lab;
    psi_rot = evolve_adaptive<Scalar>(rot, t, next, rot_ctl) * psi_rot;
    t = next;
    using std::abs;
    residual = std::max(residual, abs(population_zero(psi_lab) - population_zero(psi_rot)));
  }
  return residual;
}

}  // namespace floquet

#endif  // FLOQUET_DYNAMICS_HPP
