#ifndef FLOQUET_TYPES_HPP
#define FLOQUET_TYPES_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace floquet {

enum class ErrorKind {
  StepUnderflow,
  PreconditionViolated,
  DegenerateSystem,
  NoPeakFound,
  NotNearResonance,
  FilterBandsOverlap,
  ParseError,
  ValidationError,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::DegenerateSystem: return "DegenerateSystem";
    case ErrorKind::NoPeakFound: return "NoPeakFound";
    case ErrorKind::NotNearResonance: return "NotNearResonance";
    case ErrorKind::FilterBandsOverlap: return "FilterBandsOverlap";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

template <typename Scalar>
using Matrix2c = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

/// Two-component amplitude vector over (|0>, |-1>).
template <typename Scalar>
using SpinState = Eigen::Matrix<std::complex<Scalar>, 2, 1>;

using Matrix2cd = Matrix2c<double>;
using SpinStated = SpinState<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Frequencies are angular (rad/s) internally; configuration and reports use MHz.
constexpr double mhz(double f) { return kTwoPi * 1e6 * f; }
constexpr double khz(double f) { return kTwoPi * 1e3 * f; }
constexpr double to_mhz(double angular) { return angular / (kTwoPi * 1e6); }
constexpr double microseconds(double t) { return t * 1e-6; }
constexpr double to_microseconds(double t) { return t * 1e6; }

/// Parameters of the rotating-frame drive
///   H(t) = (dz/2) sz + (dx/2) sx + A sin(phi(t)) sx,
///   phi(t) = w t + (a/nu) sin(nu t).
/// All entries are angular frequencies.
template <typename Scalar>
struct DriveParams {
  Scalar delta_z{0};
  Scalar delta_x{0};
  Scalar amp_a{0};
  Scalar omega{0};
  Scalar phase_mod_a{0};
  Scalar phase_mod_nu{0};

  Scalar omega0() const {
    using std::hypot;
    return hypot(delta_z, delta_x);
  }
  bool modulated() const { return phase_mod_a != Scalar(0); }
  /// Outside this regime the ladder picture loses accuracy; callers warn, never reject.
  bool weak_drive() const { return amp_a < omega0(); }
};

using DriveParamsd = DriveParams<double>;

template <typename Scalar>
void validate(const DriveParams<Scalar>& p) {
  if (!(p.delta_x >= 0)) throw Error(ErrorKind::PreconditionViolated, "delta_x must be >= 0");
  if (!(p.amp_a >= 0)) throw Error(ErrorKind::PreconditionViolated, "amp_a must be >= 0");
  if (!(p.omega > 0)) throw Error(ErrorKind::PreconditionViolated, "omega must be > 0");
  if (p.phase_mod_a != Scalar(0) && !(p.phase_mod_nu > 0))
    throw Error(ErrorKind::PreconditionViolated,
                "phase_mod_nu must be > 0 when phase modulation is enabled");
}

template <typename Scalar>
struct HamiltonianSample {
  Matrix2c<Scalar> matrix;
  Scalar t;
};

/// Evolution operator over [t_start, t_end].
template <typename Scalar>
struct Propagator {
  Matrix2c<Scalar> u = Matrix2c<Scalar>::Identity();
  Scalar t_start{0};
  Scalar t_end{0};

  /// Apply this after `earlier`; requires earlier.t_end == t_start.
  Propagator then_after(const Propagator& earlier) const {
    return {u * earlier.u, earlier.t_start, t_end};
  }

  Scalar unitarity_defect() const {
    return (u.adjoint() * u - Matrix2c<Scalar>::Identity()).norm();
  }
};

template <typename Scalar>
SpinState<Scalar> ket_zero() {
  return SpinState<Scalar>(1, 0);
}

template <typename Scalar>
SpinState<Scalar> ket_minus_one() {
  return SpinState<Scalar>(0, 1);
}

template <typename Scalar>
Scalar population_zero(const SpinState<Scalar>& psi) {
  return std::norm(psi(0));
}

}  // namespace floquet

#endif  // FLOQUET_TYPES_HPP
