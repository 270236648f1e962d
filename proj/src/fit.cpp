#include "floquet/fit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <unsupported/Eigen/LevenbergMarquardt>

#include "floquet/numeric.hpp"
#include "floquet/types.hpp"

namespace floquet {

namespace {

struct ResidualFunctor : Eigen::DenseFunctor<double> {
  const Model& model;
  std::span<const double> x;
  std::span<const double> y;

  ResidualFunctor(const Model& m, std::span<const double> xs, std::span<const double> ys, int n_params)
      : Eigen::DenseFunctor<double>(n_params, static_cast<int>(xs.size())), model(m), x(xs), y(ys) {}

  int operator()(const InputType& p, ValueType& fvec) const {
    for (std::size_t i = 0; i < x.size(); ++i) fvec(static_cast<Eigen::Index>(i)) = model(x[i], p) - y[i];
    return 0;
  }

  int df(const InputType& p, JacobianType& jac) const {
    ValueType plus(values());
    ValueType minus(values());
    InputType q = p;
    for (Eigen::Index j = 0; j < p.size(); ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(p(j)));
      q(j) = p(j) + h;
      (*this)(q, plus);
      q(j) = p(j) - h;
      (*this)(q, minus);
      q(j) = p(j);
      jac.col(j) = (plus - minus) / (2 * h);
    }
    return 0;
  }
};

std::vector<double> evaluate(const Model& model, std::span<const double> x, const Eigen::VectorXd& p) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = model(x[i], p);
  return out;
}

void check_samples(std::span<const double> x, std::span<const double> y, std::size_t min_size) {
  if (x.size() != y.size() || x.size() < min_size)
    throw Error(ErrorKind::PreconditionViolated, "fit needs paired samples of sufficient length");
}

}  // namespace

double r_squared(std::span<const double> y, std::span<const double> fitted) {
  double mean = 0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_res = 0;
  double ss_tot = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - fitted[i]) * (y[i] - fitted[i]);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  return ss_tot > 0 ? 1.0 - ss_res / ss_tot : (ss_res == 0 ? 1.0 : 0.0);
}

FitResult least_squares(const Model& model, std::span<const double> x, std::span<const double> y,
                        const Eigen::VectorXd& initial) {
  check_samples(x, y, static_cast<std::size_t>(initial.size()) + 1);
  ResidualFunctor functor(model, x, y, static_cast<int>(initial.size()));
  Eigen::LevenbergMarquardt<ResidualFunctor> lm(functor);
  lm.setMaxfev(2000);
  lm.setXtol(1e-12);
  lm.setFtol(1e-12);
  Eigen::VectorXd p = initial;
  const auto status = lm.minimize(p);

  FitResult result;
  result.params = p;
  const auto fitted = evaluate(model, x, p);
  result.r_squared = r_squared(y, fitted);
  double ss = 0;
  for (std::size_t i = 0; i < y.size(); ++i) ss += (y[i] - fitted[i]) * (y[i] - fitted[i]);
  result.rms_residual = std::sqrt(ss / static_cast<double>(y.size()));
  result.converged = status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters &&
                     status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation;
  return result;
}

FitResult fit_sinusoid(std::span<const double> t, std::span<const double> y, double omega_max) {
  check_samples(t, y, 8);
  const double t0 = t.front();
  const double scale = t.back() - t.front();
  std::vector<double> ts(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) ts[i] = (t[i] - t0) / scale;

  const double omega_seed = dominant_frequency(t, y, omega_max) * scale;
  double mean = 0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  std::complex<double> c{0, 0};
  for (std::size_t i = 0; i < ts.size(); ++i) c += (y[i] - mean) * std::polar(1.0, -omega_seed * ts[i]);
  const double amp_seed = 2.0 * std::abs(c) / static_cast<double>(ts.size());

  Model model = [](double x, const Eigen::VectorXd& p) { return p(0) + p(1) * std::cos(p(2) * x + p(3)); };
  Eigen::VectorXd p0(4);
  p0 << mean, amp_seed, omega_seed, std::arg(c);
  FitResult fit = least_squares(model, ts, y, p0);

  // back to SI time, with a non-negative amplitude
  Eigen::VectorXd& p = fit.params;
  if (p(1) < 0) {
    p(1) = -p(1);
    p(3) += std::numbers::pi;
  }
  if (p(2) < 0) {
    p(2) = -p(2);
    p(3) = -p(3);
  }
  p(3) -= p(2) * t0 / scale;
  p(2) /= scale;
  p(3) = std::remainder(p(3), kTwoPi);
  return fit;
}

FitResult fit_lorentzian(std::span<const double> x, std::span<const double> y) {
  check_samples(x, y, 4);
  const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const double height = y[peak];
  const double x_peak = x[peak];
  const double scale = std::abs(x.back() - x.front());

  // half width at half maximum on each side, for the seed
  std::size_t lo = peak;
  while (lo > 0 && y[lo] > height / 2) --lo;
  std::size_t hi = peak;
  while (hi + 1 < y.size() && y[hi] > height / 2) ++hi;
  const double hwhm = std::max(std::abs(x[hi] - x[lo]) / 2, scale * 1e-3);

  std::vector<double> xs(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xs[i] = (x[i] - x_peak) / scale;
  Model model = [](double u, const Eigen::VectorXd& p) {
    const double g2 = p(2) * p(2);
    return p(0) * g2 / (g2 + (u - p(1)) * (u - p(1)));
  };
  Eigen::VectorXd p0(3);
  p0 << height, 0.0, hwhm / scale;
  FitResult fit = least_squares(model, xs, y, p0);
  Eigen::VectorXd& p = fit.params;
  p(1) = x_peak + p(1) * scale;
  p(2) = std::abs(p(2)) * scale;
  return fit;
}

FitResult fit_gaussian_decay_cosine(std::span<const double> t, std::span<const double> y,
                                    double omega_max) {
  check_samples(t, y, 10);
  const double t0 = t.front();
  const double scale = t.back() - t.front();
  std::vector<double> ts(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) ts[i] = (t[i] - t0) / scale;
  const double omega_seed = dominant_frequency(t, y, omega_max) * scale;

  // Seed the decay time by scanning it and solving the remaining linear
  // coefficients (offset, cos and sin amplitudes) exactly at each trial.
  const auto n = static_cast<Eigen::Index>(ts.size());
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  double best_cost = std::numeric_limits<double>::infinity();
  Eigen::Vector3d best_coef = Eigen::Vector3d::Zero();
  double best_decay = 1.0;
  for (int k = 0; k <= 120; ++k) {
    const double decay = 0.02 * std::pow(10.0, 3.0 * k / 120.0);
    Eigen::MatrixXd basis(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = ts[static_cast<std::size_t>(i)];
      const double env = std::exp(-(u / decay) * (u / decay));
      basis(i, 0) = 1.0;
      basis(i, 1) = env * std::cos(omega_seed * u);
      basis(i, 2) = env * std::sin(omega_seed * u);
    }
    const Eigen::Vector3d coef = basis.colPivHouseholderQr().solve(rhs);
    const double cost = (basis * coef - rhs).squaredNorm();
    if (cost < best_cost) {
      best_cost = cost;
      best_coef = coef;
      best_decay = decay;
    }
  }

  Model model = [](double u, const Eigen::VectorXd& p) {
    return p(0) + p(1) * std::exp(-(u / p(2)) * (u / p(2))) * std::cos(p(3) * u + p(4));
  };
  Eigen::VectorXd p0(5);
  // b cos + c sin = A cos(wt + phi) with A = hypot(b, c), phi = atan2(-c, b)
  p0 << best_coef(0), std::hypot(best_coef(1), best_coef(2)), best_decay, omega_seed,
      std::atan2(-best_coef(2), best_coef(1));
  FitResult fit = least_squares(model, ts, y, p0);
  Eigen::VectorXd& p = fit.params;
  if (p(1) < 0) {
    p(1) = -p(1);
    p(4) += std::numbers::pi;
  }
  p(2) = std::abs(p(2)) * scale;
  // shift the time origin back; the envelope is only meaningful for t0 = 0
  p(4) -= p(3) * t0 / scale;
  p(3) /= scale;
  p(4) = std::remainder(p(4), kTwoPi);
  return fit;
}

}  // namespace floquet
