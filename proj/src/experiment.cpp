#include "floquet/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "floquet/dynamics.hpp"
#include "floquet/numeric.hpp"

namespace floquet {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double segment_duration(const Segment& seg) {
  return std::visit([](const auto& s) { return s.duration; }, seg);
}

Matrix2cd static_hamiltonian(double z_half, const Matrix2cd& transverse) {
  return z_half * sigma_z<double>() + transverse;
}

/// Propagator of one segment between local times [from, to], with the
/// realization's detuning offset added to the longitudinal term.
Matrix2cd segment_propagator(const Segment& seg, double offset, double from, double to, double tol) {
  return std::visit(
      Overloaded{
          [&](const ResonantPulse& s) -> Matrix2cd {
            const Matrix2cd axis = s.axis == Axis::X ? sigma_x<double>() : sigma_y<double>();
            const Matrix2cd h = static_hamiltonian(offset / 2, s.rabi_amp * axis);
            return exp_hermitian<double>(h * (to - from));
          },
          [&](const FreeEvolution& s) -> Matrix2cd {
            const Matrix2cd h = static_hamiltonian((s.detuning + offset) / 2, Matrix2cd::Zero());
            return exp_hermitian<double>(h * (to - from));
          },
          [&](const FloquetDrive& s) -> Matrix2cd {
            DriveParamsd p = s.params;
            p.delta_z += offset;
            auto ham = [&p](double t) { return rotating_frame_matrix(p, t); };
            return evolve_adaptive<double>(ham, from + s.clock_offset, to + s.clock_offset,
                                           default_step_control(p, tol));
          },
      },
      seg);
}

std::vector<double> draw_offsets(const NoiseModel& noise, std::mt19937_64& rng) {
  if (noise.sigma_detuning == 0) return {0.0};
  std::normal_distribution<double> gauss(0.0, noise.sigma_detuning);
  std::vector<double> out(static_cast<std::size_t>(noise.n_realizations));
  for (double& v : out) v = gauss(rng);
  return out;
}

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

void apply_readout(std::vector<double>& values, const NoiseModel& noise, std::mt19937_64& rng) {
  if (!noise.readout_shots) return;
  const std::int64_t shots = *noise.readout_shots;
  for (double& v : values) {
    std::binomial_distribution<std::int64_t> draw(shots, v);
    v = static_cast<double>(draw(rng)) / static_cast<double>(shots);
  }
}

/// Averages per-realization columns in fixed index order.
std::vector<double> average(const std::vector<std::vector<double>>& runs) {
  std::vector<double> out(runs.front().size(), 0.0);
  for (const auto& run : runs)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += run[i];
  for (double& v : out) v /= static_cast<double>(runs.size());
  return out;
}

const DriveParamsd* first_drive(const PulseSequence& seq) {
  for (const auto& seg : seq.segments)
    if (const auto* d = std::get_if<FloquetDrive>(&seg)) return &d->params;
  return nullptr;
}

double drive_period(const DriveParamsd& p) { return kTwoPi / p.omega; }

std::size_t samples_per(double span, double dt) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(span / dt)));
}

}  // namespace

ResonantPulse rotation_pulse(double angle, double rabi_amp, Axis axis) {
  if (!(rabi_amp > 0)) throw Error(ErrorKind::PreconditionViolated, "pulse amplitude must be positive");
  return {rabi_amp, angle / (2.0 * rabi_amp), axis};
}

double PulseSequence::duration() const {
  double total = 0;
  for (const auto& seg : segments) total += segment_duration(seg);
  return total;
}

std::string PulseSequence::describe() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& seg : segments) {
    if (!first) out << " -> ";
    first = false;
    std::visit(Overloaded{
                   [&](const ResonantPulse& s) {
                     out << (s.axis == Axis::X ? "X" : "Y") << "(" << 2 * s.rabi_amp * s.duration << " rad)";
                   },
                   [&](const FloquetDrive& s) { out << "Drive(" << to_microseconds(s.duration) << " us)"; },
                   [&](const FreeEvolution& s) { out << "Free(" << to_microseconds(s.duration) << " us)"; },
               },
               seg);
  }
  return out.str();
}

void PulseSequence::validate() const {
  if (segments.empty()) throw Error(ErrorKind::PreconditionViolated, "pulse sequence is empty");
  for (const auto& seg : segments) {
    if (!(segment_duration(seg) >= 0))
      throw Error(ErrorKind::PreconditionViolated, "segment durations must be >= 0");
    if (const auto* d = std::get_if<FloquetDrive>(&seg)) {
      floquet::validate(d->params);
      if (!(d->clock_offset >= 0))
        throw Error(ErrorKind::PreconditionViolated, "drive clock offset must be >= 0");
    }
  }
}

std::array<FloquetDrive, 2> split_drive(const FloquetDrive& drive, double at) {
  if (!(at >= 0 && at <= drive.duration))
    throw Error(ErrorKind::PreconditionViolated, "split point outside the drive segment");
  FloquetDrive head = drive;
  head.duration = at;
  FloquetDrive tail = drive;
  tail.duration = drive.duration - at;
  tail.clock_offset = drive.clock_offset + at;
  return {head, tail};
}

void NoiseModel::validate() const {
  if (!(sigma_detuning >= 0)) throw Error(ErrorKind::PreconditionViolated, "sigma_detuning must be >= 0");
  if (n_realizations < 1) throw Error(ErrorKind::PreconditionViolated, "n_realizations must be >= 1");
  if (readout_shots && *readout_shots < 1)
    throw Error(ErrorKind::PreconditionViolated, "readout_shots must be >= 1");
}

TimeTrace run_sequence(const PulseSequence& seq, const NoiseModel& noise,
                       std::span<const double> sample_times, const RunOptions& options) {
  seq.validate();
  noise.validate();
  const double total = seq.duration();
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    if (sample_times[i] < 0 || sample_times[i] > total * (1 + 1e-12))
      throw Error(ErrorKind::PreconditionViolated, "sample time outside the sequence");
    if (i > 0 && !(sample_times[i] > sample_times[i - 1]))
      throw Error(ErrorKind::PreconditionViolated, "sample times must be strictly increasing");
  }

  std::mt19937_64 rng(noise.seed);
  const std::vector<double> offsets = draw_offsets(noise, rng);
  const bool bands = options.band_basis.has_value();
  std::vector<std::vector<double>> p0_runs(offsets.size());
  std::vector<std::vector<double>> band_runs(offsets.size());

  parallel_for(offsets.size(), noise.threads, [&](std::size_t r) {
    std::vector<double>& p0 = p0_runs[r];
    std::vector<double>& lower = band_runs[r];
    p0.reserve(sample_times.size());
    SpinStated psi = options.initial_state;
    auto record = [&] {
      p0.push_back(clamp_probability(population_zero(psi)));
      if (bands) lower.push_back(clamp_probability(std::norm(options.band_basis->minus.dot(psi))));
    };
    std::size_t next = 0;
    double seg_start = 0;
    for (const auto& seg : seq.segments) {
      const double seg_end = seg_start + segment_duration(seg);
      double local = 0;
      while (next < sample_times.size() && sample_times[next] <= seg_end) {
        const double target = std::max(0.0, sample_times[next] - seg_start);
        psi = segment_propagator(seg, offsets[r], local, target, options.tol) * psi;
        local = target;
        record();
        ++next;
      }
      psi = segment_propagator(seg, offsets[r], local, seg_end - seg_start, options.tol) * psi;
      seg_start = seg_end;
    }
    // samples within rounding of the end
    while (next < sample_times.size()) {
      record();
      ++next;
    }
  });

  TimeTrace trace;
  trace.times.assign(sample_times.begin(), sample_times.end());
  trace.values = average(p0_runs);
  if (bands) trace.lower_band = average(band_runs);
  apply_readout(trace.values, noise, rng);
  if (const DriveParamsd* p = first_drive(seq)) trace.metadata.params = *p;
  trace.metadata.noise = noise;
  trace.metadata.description = seq.describe();
  return trace;
}

TimeTrace simulate_rabi(double delta_z, double delta_x, std::span<const double> times,
                        const NoiseModel& noise) {
  DriveParamsd p;
  p.delta_z = delta_z;
  p.delta_x = delta_x;
  // drive amplitude is zero, so omega only sets the reference step size
  p.omega = std::max(p.omega0(), 1.0);
  const double end = times.empty() ? 0.0 : times.back();
  PulseSequence seq{{FloquetDrive{p, end, 0.0}}};
  TimeTrace trace = run_sequence(seq, noise, times);
  trace.metadata.description = "Rabi: " + trace.metadata.description;
  return trace;
}

TimeTrace simulate_ramsey(double detuning, std::span<const double> free_times, const NoiseModel& noise,
                          double pulse_amp) {
  noise.validate();
  const ResonantPulse half_pi = rotation_pulse(std::numbers::pi / 2, pulse_amp);
  std::mt19937_64 rng(noise.seed);
  const std::vector<double> offsets = draw_offsets(noise, rng);
  std::vector<std::vector<double>> runs(offsets.size());

  parallel_for(offsets.size(), noise.threads, [&](std::size_t r) {
    const Matrix2cd pulse = segment_propagator(half_pi, offsets[r], 0.0, half_pi.duration, 1e-8);
    const FreeEvolution free{detuning, 0.0};
    runs[r].reserve(free_times.size());
    for (double t : free_times) {
      if (!(t >= 0)) throw Error(ErrorKind::PreconditionViolated, "free evolution time must be >= 0");
      const SpinStated psi = pulse * segment_propagator(free, offsets[r], 0.0, t, 1e-8) * pulse * ket_zero<double>();
      runs[r].push_back(clamp_probability(population_zero(psi)));
    }
  });

  TimeTrace trace;
  trace.times.assign(free_times.begin(), free_times.end());
  trace.values = average(runs);
  apply_readout(trace.values, noise, rng);
  trace.metadata.params.delta_z = detuning;
  trace.metadata.noise = noise;
  trace.metadata.description = "Ramsey: Y(pi/2) -> Free(t) -> Y(pi/2)";
  return trace;
}

TimeTrace simulate_floquet_raman(const DriveParamsd& params, double prep_theta, std::span<const double> times,
                                 const NoiseModel& noise, double prep_amp) {
  const ResonantPulse prep = rotation_pulse(prep_theta, prep_amp);
  const double end = times.empty() ? 0.0 : times.back();
  PulseSequence seq{{prep, FloquetDrive{params, end, 0.0}}};
  std::vector<double> shifted(times.begin(), times.end());
  for (double& t : shifted) t += prep.duration;

  RunOptions options;
  options.band_basis = eigenbasis(params);
  TimeTrace trace = run_sequence(seq, noise, shifted, options);
  trace.times.assign(times.begin(), times.end());
  return trace;
}

TimeTrace simulate_third_order(const DriveParamsd& params, std::span<const double> times,
                               const NoiseModel& noise) {
  TimeTrace trace = simulate_floquet_raman(params, eigenbasis(params).theta, times, noise);
  trace.metadata.description = "third-order " + trace.metadata.description;
  return trace;
}

TimeTrace simulate_photon_assisted(const DriveParamsd& params, std::span<const double> times,
                                   const NoiseModel& noise) {
  RunOptions options;
  options.band_basis = eigenbasis(params);
  options.initial_state = options.band_basis->plus;
  const double end = times.empty() ? 0.0 : times.back();
  PulseSequence seq{{FloquetDrive{params, end, 0.0}}};
  TimeTrace trace = run_sequence(seq, noise, times, options);
  for (std::size_t i = 0; i < trace.values.size(); ++i) trace.values[i] = 1.0 - trace.lower_band[i];
  trace.metadata.description = "photon-assisted from |+>: " + trace.metadata.description;
  return trace;
}

TimeTrace extract_interband_population(const TimeTrace& trace, const DriveParamsd& params) {
  const EigenBasis basis = eigenbasis(params);
  if (!is_uniform(trace.times) || trace.times.size() < 2)
    throw Error(ErrorKind::PreconditionViolated, "filtering needs a uniform time grid");
  const double dt = trace.times[1] - trace.times[0];
  const double period = drive_period(params);

  TimeTrace out;
  out.times = trace.times;
  out.metadata = trace.metadata;
  out.metadata.description = "slow lower-band population of " + trace.metadata.description;

  if (!trace.lower_band.empty()) {
    out.values = moving_average(trace.lower_band, samples_per(period, dt));
    return out;
  }

  const auto eps = quasienergies(params);
  const double omega_f = quasienergy_distance(eps[0], eps[1], params.omega);
  if (omega_f > basis.omega0 / 4)
    throw Error(ErrorKind::FilterBandsOverlap, "Raman frequency too close to omega0 for low-pass separation");
  if (dt > std::numbers::pi / basis.omega0)
    throw Error(ErrorKind::PreconditionViolated, "trace sampled below the Nyquist rate for omega0");
  const double cos_theta = std::cos(basis.theta);
  if (std::abs(cos_theta) < 1e-3)
    throw Error(ErrorKind::PreconditionViolated, "P|0> carries no band information at theta = pi/2");

  const auto pass1 = moving_average(trace.values, samples_per(period, dt));
  const auto slow_p0 = moving_average(pass1, samples_per(kTwoPi / basis.omega0, dt));
  const double c2 = std::cos(basis.theta / 2) * std::cos(basis.theta / 2);
  out.values.resize(slow_p0.size());
  for (std::size_t i = 0; i < slow_p0.size(); ++i) out.values[i] = (c2 - slow_p0[i]) / cos_theta;
  return out;
}

std::vector<double> slow_population_zero(const TimeTrace& trace, const DriveParamsd& params) {
  const EigenBasis basis = eigenbasis(params);
  const TimeTrace slow = extract_interband_population(trace, params);
  const double c2 = std::cos(basis.theta / 2) * std::cos(basis.theta / 2);
  std::vector<double> out(slow.values.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = clamp_probability(c2 - std::cos(basis.theta) * slow.values[i]);
  return out;
}

BandTrace periodic_band_trace(const DriveParamsd& params, double duration, int samples_per_period, double tol) {
  validate(params);
  if (params.modulated())
    throw Error(ErrorKind::PreconditionViolated, "periodic propagation needs an unmodulated drive");
  if (samples_per_period < 1 || !(duration >= 0))
    throw Error(ErrorKind::PreconditionViolated, "invalid sampling for periodic trace");
  const EigenBasis basis = eigenbasis(params);
  const double dt = drive_period(params) / samples_per_period;
  const auto ctl = default_step_control(params, tol);
  auto ham = [&params](double t) { return rotating_frame_matrix(params, t); };

  std::vector<Matrix2cd> steps(static_cast<std::size_t>(samples_per_period));
  for (int j = 0; j < samples_per_period; ++j)
    steps[static_cast<std::size_t>(j)] = evolve_adaptive<double>(ham, j * dt, (j + 1) * dt, ctl);

  const auto count = static_cast<std::size_t>(std::ceil(duration / dt)) + 1;
  BandTrace out;
  out.times.resize(count);
  out.lower.resize(count);
  SpinStated psi = basis.plus;
  for (std::size_t k = 0; k < count; ++k) {
    out.times[k] = static_cast<double>(k) * dt;
    out.lower[k] = std::norm(basis.minus.dot(psi));
    psi = steps[k % steps.size()] * psi;
  }
  return out;
}

double transfer_contrast(const DriveParamsd& params, double window, int samples_per_period) {
  const BandTrace trace = periodic_band_trace(params, window, samples_per_period);
  const auto slow = moving_average_valid(trace.lower, static_cast<std::size_t>(samples_per_period));
  if (slow.empty()) throw Error(ErrorKind::PreconditionViolated, "contrast window shorter than a drive period");
  const auto [lo, hi] = std::minmax_element(slow.begin(), slow.end());
  return *hi - *lo;
}

RamanFit fit_raman_frequency(const DriveParamsd& params, double omega_f_guess, double periods) {
  if (!(omega_f_guess > 0)) throw Error(ErrorKind::PreconditionViolated, "Raman frequency guess must be positive");
  constexpr int kSamples = 64;
  const BandTrace trace = periodic_band_trace(params, periods * kTwoPi / omega_f_guess, kSamples);
  const auto slow = moving_average_valid(trace.lower, kSamples);
  const double dt = trace.times[1] - trace.times[0];
  const double lag = dt * (kSamples - 1) / 2.0;

  // the slow component is oversampled; keep 8 points per drive period
  constexpr std::size_t kStride = kSamples / 8;
  std::vector<double> t;
  std::vector<double> y;
  for (std::size_t i = 0; i < slow.size(); i += kStride) {
    t.push_back(static_cast<double>(i) * dt + lag);
    y.push_back(slow[i]);
  }
  RamanFit out;
  out.fit = fit_sinusoid(t, y, std::min(params.omega / 2, 4.0 * omega_f_guess));
  out.omega_f = out.fit.params(2);
  return out;
}

FitResult fit_oscillation(const TimeTrace& trace) {
  if (trace.times.size() < 8) throw Error(ErrorKind::PreconditionViolated, "trace too short to fit");
  const double dt = (trace.times.back() - trace.times.front()) / static_cast<double>(trace.times.size() - 1);
  return fit_sinusoid(trace.times, trace.values, std::numbers::pi / dt);
}

FitResult fit_ramsey(const TimeTrace& trace) {
  if (trace.times.size() < 10) throw Error(ErrorKind::PreconditionViolated, "trace too short to fit");
  const double dt = (trace.times.back() - trace.times.front()) / static_cast<double>(trace.times.size() - 1);
  return fit_gaussian_decay_cosine(trace.times, trace.values, std::numbers::pi / dt);
}

const std::vector<double>& ScanResult::column(std::string_view name) const {
  for (const auto& [key, col] : columns)
    if (key == name) return col;
  throw Error(ErrorKind::PreconditionViolated, "no scan column named " + std::string(name));
}

double ScanResult::summary_value(std::string_view name) const {
  for (const auto& [key, v] : summary)
    if (key == name) return v;
  throw Error(ErrorKind::PreconditionViolated, "no scan summary named " + std::string(name));
}

ScanResult scan_rabi_vs_amplitude(std::span<const double> amplitudes, const DriveParamsd& base, int m,
                                  unsigned threads) {
  validate(base);
  const double center = resonance_frequency(base, m);
  const double width = 0.1 * center;
  const std::size_t n = amplitudes.size();
  std::vector<double> resonance(n, center), fitted(n, 0.0), ladder(n, 0.0), gap(n, 0.0), r2(n, 1.0);

  parallel_for(n, threads, [&](std::size_t i) {
    DriveParamsd p = base;
    p.amp_a = amplitudes[i];
    if (p.amp_a == 0) return;
    ladder[i] = ladder_gap_minimum(p, m, width).gap;
    gap[i] = quasienergy_gap_minimum(p, m, width).gap;
    resonance[i] = resonance_locate(p, m, width);
    p.omega = resonance[i];
    const auto eps = quasienergies(p);
    const RamanFit fit = fit_raman_frequency(p, quasienergy_distance(eps[0], eps[1], p.omega));
    fitted[i] = fit.omega_f;
    r2[i] = fit.fit.r_squared;
  });

  ScanResult out;
  out.variable = "amp_a";
  out.values.assign(amplitudes.begin(), amplitudes.end());
  out.columns = {{"resonance", resonance},
                 {"omega_f_fit", fitted},
                 {"omega_f_ladder", ladder},
                 {"omega_f_gap", gap},
                 {"fit_r2", r2}};
  return out;
}

ScanResult scan_contrast_vs_frequency(std::span<const double> omegas, const DriveParamsd& base, int m,
                                      unsigned threads) {
  validate(base);
  const double center = resonance_frequency(base, m);
  const GapMinimum resonant = quasienergy_gap_minimum(base, m, 0.1 * center);
  if (!(resonant.gap > 0)) throw Error(ErrorKind::NoPeakFound, "no Raman coupling at this amplitude");
  const double window = 3.0 * kTwoPi / resonant.gap;

  std::vector<double> contrast(omegas.size());
  parallel_for(omegas.size(), threads, [&](std::size_t i) {
    DriveParamsd p = base;
    p.omega = omegas[i];
    contrast[i] = transfer_contrast(p, window);
  });

  ScanResult out;
  out.variable = "omega";
  out.values.assign(omegas.begin(), omegas.end());
  const FitResult fit = fit_lorentzian(out.values, contrast);
  std::vector<double> curve(omegas.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double g2 = fit.params(2) * fit.params(2);
    const double d = omegas[i] - fit.params(1);
    curve[i] = fit.params(0) * g2 / (g2 + d * d);
  }
  out.columns = {{"contrast", contrast}, {"lorentzian", curve}};
  out.summary = {{"lorentz_height", fit.params(0)},
                 {"lorentz_center", fit.params(1)},
                 {"lorentz_gamma", fit.params(2)},
                 {"lorentz_r2", fit.r_squared},
                 {"window", window},
                 {"resonant_omega_f", resonant.gap}};
  return out;
}

ScanResult scan_localization(const DriveParamsd& base, std::span<const double> ratios,
                             std::span<const double> times, unsigned threads) {
  validate(base);
  if (!(base.phase_mod_nu > 0))
    throw Error(ErrorKind::PreconditionViolated, "localization scan needs phase_mod_nu > 0");
  std::vector<double> sorted(times.begin(), times.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::vector<double>> lower(ratios.size());

  parallel_for(ratios.size(), threads, [&](std::size_t i) {
    DriveParamsd p = base;
    p.phase_mod_a = ratios[i] * base.phase_mod_nu;
    lower[i] = simulate_photon_assisted(p, sorted).lower_band;
  });

  ScanResult out;
  out.variable = "a_over_nu";
  out.values.assign(ratios.begin(), ratios.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    std::vector<double> col(ratios.size());
    for (std::size_t i = 0; i < ratios.size(); ++i) col[i] = lower[i][k];
    std::ostringstream name;
    name << "p_lower_" << to_microseconds(sorted[k]) << "us";
    out.columns.emplace_back(name.str(), std::move(col));
  }
  return out;
}

}  // namespace floquet
