#ifndef FLOQUET_EXPERIMENT_HPP
#define FLOQUET_EXPERIMENT_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "floquet/fit.hpp"
#include "floquet/floquet.hpp"
#include "floquet/types.hpp"

namespace floquet {

enum class Axis { X, Y };

/// Resonant rotation pulse H = rabi_amp * sigma_axis; rotation angle 2 * rabi_amp * duration.
struct ResonantPulse {
  double rabi_amp = 0;
  double duration = 0;
  Axis axis = Axis::Y;
};

/// Pulse of amplitude rabi_amp rotating by `angle`, i.e. duration angle / (2 rabi_amp).
ResonantPulse rotation_pulse(double angle, double rabi_amp, Axis axis = Axis::Y);

/// Floquet drive segment. The drive clock reads clock_offset at the segment start.
struct FloquetDrive {
  DriveParamsd params;
  double duration = 0;
  double clock_offset = 0;
};

struct FreeEvolution {
  double detuning = 0;
  double duration = 0;
};

using Segment = std::variant<ResonantPulse, FloquetDrive, FreeEvolution>;

struct PulseSequence {
  std::vector<Segment> segments;

  double duration() const;
  std::string describe() const;
  /// Throws PreconditionViolated on an empty sequence or a negative duration.
  void validate() const;
};

/// Splits a drive at local time `at`, keeping the drive clock continuous.
std::array<FloquetDrive, 2> split_drive(const FloquetDrive& drive, double at);

/// Quasi-static Gaussian detuning noise, resampled once per realization.
struct NoiseModel {
  double sigma_detuning = 0;
  int n_realizations = 1;
  std::optional<std::int64_t> readout_shots;  ///< nullopt: exact expectation values
  std::uint64_t seed = 0;
  unsigned threads = 0;  ///< 0: hardware concurrency

  void validate() const;
};

struct TraceMetadata {
  DriveParamsd params;
  NoiseModel noise;
  std::string description;
};

struct TimeTrace {
  std::vector<double> times;
  std::vector<double> values;      ///< P|0>, unless documented otherwise
  std::vector<double> lower_band;  ///< |<-|psi>|^2 when a band basis was supplied, else empty
  TraceMetadata metadata;
};

struct RunOptions {
  std::optional<EigenBasis> band_basis;
  SpinStated initial_state = ket_zero<double>();
  double tol = 1e-8;
};

/// Applies the segments in order from the initial state (|0> after optical
/// pumping by default) and records P|0> at each sample time, averaged over
/// the noise realizations. Sample times are absolute and strictly increasing.
TimeTrace run_sequence(const PulseSequence& seq, const NoiseModel& noise,
                       std::span<const double> sample_times, const RunOptions& options = {});

/// Static detuned drive dz/2 sz + dx/2 sx from |0>.
TimeTrace simulate_rabi(double delta_z, double delta_x, std::span<const double> times,
                        const NoiseModel& noise = {});

/// Y(pi/2) - free evolution(t) - Y(pi/2) for each t in `free_times`.
TimeTrace simulate_ramsey(double detuning, std::span<const double> free_times,
                          const NoiseModel& noise = {}, double pulse_amp = mhz(20.0));

/// Y(prep_theta) preparation followed by the Floquet drive. Times are measured
/// from the drive start; lower_band is recorded in the bare eigenbasis.
TimeTrace simulate_floquet_raman(const DriveParamsd& params, double prep_theta,
                                 std::span<const double> times, const NoiseModel& noise = {},
                                 double prep_amp = mhz(20.0));

/// Raman trace at the third-order resonance; identical procedure to the
/// second-order one, prepared in |+>.
TimeTrace simulate_third_order(const DriveParamsd& params, std::span<const double> times,
                               const NoiseModel& noise = {});

/// Phase-modulated drive starting in the upper band. `values` holds the
/// upper-band probability, `lower_band` its complement.
TimeTrace simulate_photon_assisted(const DriveParamsd& params, std::span<const double> times,
                                   const NoiseModel& noise = {});

/// Slow lower-band population. Uses the band projection when the trace carries
/// one, otherwise low-pass filters P|0> (cascaded boxcars over the drive period
/// and 2 pi / omega0) and inverts P0 = cos^2(theta/2) - cos(theta) P_lower.
TimeTrace extract_interband_population(const TimeTrace& trace, const DriveParamsd& params);

/// Slow part of P|0>: cos^2(theta/2) - cos(theta) * slow lower-band population.
std::vector<double> slow_population_zero(const TimeTrace& trace, const DriveParamsd& params);

/// Noiseless lower-band population from |+> sampled at k T / samples_per_period.
/// Uses U(t + T) = U(t) periodicity, so only one period is integrated.
struct BandTrace {
  std::vector<double> times;
  std::vector<double> lower;
};
BandTrace periodic_band_trace(const DriveParamsd& params, double duration,
                              int samples_per_period = 64, double tol = 1e-9);

/// Peak-to-trough amplitude of the one-period moving average of the
/// lower-band population over `window`, from |+>. 1 means complete transfer.
double transfer_contrast(const DriveParamsd& params, double window, int samples_per_period = 64);

struct RamanFit {
  double omega_f = 0;
  FitResult fit;
};

/// Fits a + b cos(Omega t + phi) to the slow lower-band population over
/// `periods` Raman periods of the guessed frequency.
RamanFit fit_raman_frequency(const DriveParamsd& params, double omega_f_guess, double periods = 3.0);

/// Oscillation frequency of a trace via a sinusoid fit seeded by its Fourier peak.
FitResult fit_oscillation(const TimeTrace& trace);

/// Gaussian-envelope cosine fit of a Ramsey trace; params(2) is the 1/e decay time.
FitResult fit_ramsey(const TimeTrace& trace);

struct ScanResult {
  std::string variable;
  std::vector<double> values;
  std::vector<std::pair<std::string, std::vector<double>>> columns;
  std::vector<std::pair<std::string, double>> summary;

  const std::vector<double>& column(std::string_view name) const;
  double summary_value(std::string_view name) const;
};

/// Per amplitude: locate the resonance, fit Omega_F in the time domain, and
/// record the two spectral estimates alongside. Values in rad/s.
ScanResult scan_rabi_vs_amplitude(std::span<const double> amplitudes, const DriveParamsd& base,
                                  int m = 2, unsigned threads = 0);

/// Transfer contrast per drive frequency over a fixed window of three Raman
/// periods at the resonant Omega_F, plus a Lorentzian fit with free center.
ScanResult scan_contrast_vs_frequency(std::span<const double> omegas, const DriveParamsd& base,
                                      int m = 2, unsigned threads = 0);

/// Lower-band probability at each of `times` versus modulation depth a/nu.
ScanResult scan_localization(const DriveParamsd& base, std::span<const double> ratios,
                             std::span<const double> times, unsigned threads = 0);

}  // namespace floquet

#endif  // FLOQUET_EXPERIMENT_HPP
