#include "floquet/numeric.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <exception>
#include <mutex>
#include <thread>

#include "floquet/types.hpp"

namespace floquet {

Extremum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                 double x_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > x_tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? Extremum{c, fc} : Extremum{d, fd};
}

Extremum bracketed_minimize(const std::function<double(double)>& f, double lo, double hi,
                            int grid_points, double x_tol) {
  grid_points = std::max(grid_points, 3);
  const auto grid = linspace(lo, hi, static_cast<std::size_t>(grid_points));
  std::size_t best = 0;
  double best_value = f(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double a = grid[best == 0 ? 0 : best - 1];
  const double b = grid[std::min(best + 1, grid.size() - 1)];
  auto negated = [&f](double x) { return -f(x); };
  Extremum refined = golden_section_maximize(negated, a, b, x_tol);
  refined.value = -refined.value;
  if (best_value < refined.value) return {grid[best], best_value};
  return refined;
}

std::vector<double> moving_average(std::span<const double> y, std::size_t window) {
  const std::size_t n = y.size();
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  window = std::clamp<std::size_t>(window, 1, n);
  const std::size_t left = (window - 1) / 2;
  const std::size_t right = window - 1 - left;
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + y[i];
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= left ? i - left : 0;
    const std::size_t hi = std::min(n - 1, i + right);
    out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
  }
  return out;
}

std::vector<double> moving_average_valid(std::span<const double> y, std::size_t window) {
  window = std::max<std::size_t>(window, 1);
  if (y.size() < window) return {};
  std::vector<double> out(y.size() - window + 1);
  double sum = 0;
  for (std::size_t i = 0; i < window; ++i) sum += y[i];
  out[0] = sum / static_cast<double>(window);
  for (std::size_t i = window; i < y.size(); ++i) {
    sum += y[i] - y[i - window];
    out[i - window + 1] = sum / static_cast<double>(window);
  }
  return out;
}

namespace {
double fourier_magnitude(std::span<const double> t, std::span<const double> y, double mean,
                         double omega) {
  std::complex<double> acc{0, 0};
  for (std::size_t i = 0; i < t.size(); ++i) acc += (y[i] - mean) * std::polar(1.0, -omega * t[i]);
  return std::abs(acc);
}
}  // namespace

double dominant_frequency(std::span<const double> t, std::span<const double> y, double omega_max) {
  if (t.size() != y.size() || t.size() < 4)
    throw Error(ErrorKind::PreconditionViolated, "dominant_frequency needs >= 4 paired samples");
  const double span = t.back() - t.front();
  if (!(span > 0)) throw Error(ErrorKind::PreconditionViolated, "samples must span a positive time");
  double mean = 0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());

  // 8x zero-padded resolution, then a golden-section polish inside the best bin
  const double bin = kTwoPi / span / 8.0;
  const auto bins = static_cast<std::size_t>(std::ceil(omega_max / bin));
  std::size_t best = 1;
  double best_mag = -1;
  for (std::size_t k = 1; k <= bins; ++k) {
    const double m = fourier_magnitude(t, y, mean, static_cast<double>(k) * bin);
    if (m > best_mag) {
      best_mag = m;
      best = k;
    }
  }
  const double lo = (static_cast<double>(best) - 1.0) * bin;
  const double hi = (static_cast<double>(best) + 1.0) * bin;
  auto mag = [&](double w) { return fourier_magnitude(t, y, mean, w); };
  return golden_section_maximize(mag, std::max(lo, bin * 1e-3), hi, bin * 1e-4).x;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  workers.clear();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> linspace(double start, double stop, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = start;
    return out;
  }
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + step * static_cast<double>(i);
  if (count > 1) out.back() = stop;
  return out;
}

bool is_uniform(std::span<const double> t, double rel_tol) {
  if (t.size() < 3) return true;
  const double dt = t[1] - t[0];
  for (std::size_t i = 2; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - dt) > rel_tol * std::abs(dt) + 1e-18) return false;
  }
  return true;
}

}  // namespace floquet
