#ifndef FLOQUET_FIT_HPP
#define FLOQUET_FIT_HPP

#include <functional>
#include <span>

#include <Eigen/Dense>

namespace floquet {

struct FitResult {
  Eigen::VectorXd params;
  double r_squared = 0;
  double rms_residual = 0;
  bool converged = false;
};

using Model = std::function<double(double x, const Eigen::VectorXd& params)>;

/// Levenberg-Marquardt fit of y ~ model(x, params), finite-difference Jacobian.
/// Callers are expected to pass O(1)-scaled x and params.
FitResult least_squares(const Model& model, std::span<const double> x, std::span<const double> y,
                        const Eigen::VectorXd& initial);

double r_squared(std::span<const double> y, std::span<const double> fitted);

/// y ~ offset + amplitude cos(omega t + phase), seeded by the dominant Fourier
/// peak below omega_max. Returns params in SI units: (offset, amplitude, omega, phase).
FitResult fit_sinusoid(std::span<const double> t, std::span<const double> y, double omega_max);

/// y ~ height gamma^2 / (gamma^2 + (x - center)^2). Returns (height, center, gamma).
FitResult fit_lorentzian(std::span<const double> x, std::span<const double> y);

/// y ~ offset + amplitude exp(-((t - t_first)/t_decay)^2) cos(omega t + phase).
/// Returns (offset, amplitude, t_decay, omega, phase) in SI units.
FitResult fit_gaussian_decay_cosine(std::span<const double> t, std::span<const double> y,
                                    double omega_max);

}  // namespace floquet

#endif  // FLOQUET_FIT_HPP
