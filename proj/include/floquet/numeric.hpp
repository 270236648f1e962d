#ifndef FLOQUET_NUMERIC_HPP
#define FLOQUET_NUMERIC_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace floquet {

struct Extremum {
  double x;
  double value;
};

/// Golden-section search for a maximum of a unimodal function on [lo, hi].
Extremum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                 double x_tol);

/// Grid scan followed by golden-section refinement around the best grid cell.
Extremum bracketed_minimize(const std::function<double(double)>& f, double lo, double hi,
                            int grid_points, double x_tol);

/// Centered moving average over `window` samples. Edge samples average over
/// the part of the window that exists.
std::vector<double> moving_average(std::span<const double> y, std::size_t window);

/// Moving average keeping only full windows; output has y.size() - window + 1
/// entries, entry k centered at sample k + (window - 1) / 2.
std::vector<double> moving_average_valid(std::span<const double> y, std::size_t window);

/// Angular frequency in (0, omega_max] that maximizes the discrete-time
/// Fourier magnitude of the mean-removed samples. Sampling may be non-uniform.
double dominant_frequency(std::span<const double> t, std::span<const double> y, double omega_max);

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Results must be written to per-index slots.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

std::vector<double> linspace(double start, double stop, std::size_t count);

bool is_uniform(std::span<const double> t, double rel_tol = 1e-9);

}  // namespace floquet

#endif  // FLOQUET_NUMERIC_HPP
