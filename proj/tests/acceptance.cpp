// Acceptance suite: one PASS/FAIL line per criterion, exit status = number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "floquet/dynamics.hpp"
#include "floquet/experiment.hpp"
#include "floquet/floquet.hpp"
#include "floquet/numeric.hpp"
#include "floquet/scenario.hpp"

using namespace floquet;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void run(const char* name, const std::function<void()>& body) {
  const auto start = std::chrono::steady_clock::now();
  try {
    body();
  } catch (const std::exception& e) {
    report(name, false, std::string("threw: ") + e.what());
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("       (%.1f s)\n", s);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DriveParamsd drive(double dz, double dx, double a, double w, double mod_a = 0, double nu = 0) {
  return {mhz(dz), mhz(dx), mhz(a), mhz(w), mhz(mod_a), mhz(nu)};
}

const DriveParamsd raman2 = drive(10.03, 9.67, 2.37, 6.985);
const DriveParamsd amp_scan = drive(9.92, 10.12, 0.0, 7.09);
const DriveParamsd contrast_scan = drive(9.63, 10.32, 1.37, 7.0);
const DriveParamsd raman3 = drive(9.82, 9.67, 2.37, 4.657);
const DriveParamsd modulated_drive = drive(10.0, 10.0, 2.404, 7.271, 0.0, 7.343);

double first_crossing(const std::vector<double>& t, const std::vector<double>& y, double level) {
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] >= level) return t[i];
  return INFINITY;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void rabi_calibration() {
  // two drive frequencies 2 MHz apart; the transition sits at 1443.53 MHz
  const double dx = mhz(4.06);
  const auto times = linspace(0.0, microseconds(2.0), 1001);
  bool pass = true;
  std::string detail;
  for (double omega_d : {1445.8, 1443.8}) {
    const double dz = mhz(1443.53 - omega_d);
    const double expected = std::hypot(dz, dx);
    const FitResult fit = fit_oscillation(simulate_rabi(dz, dx, times));
    const double rel = std::abs(fit.params(2) / expected - 1);
    pass = pass && rel < 0.005;
    detail += fmt("w_d=%.1f: fit %.5f MHz vs %.5f MHz (rel %.2e); ", omega_d, to_mhz(fit.params(2)),
                  to_mhz(expected), rel);
  }
  report("rabi calibration (rel err < 0.5%)", pass, detail);
}

void second_order_location() {
  const double w0_half = raman2.omega0() / 2;
  const double located = resonance_locate(raman2, 2, 0.1 * w0_half);
  const double rel = std::abs(located / mhz(6.97) - 1);
  const bool same_side = (located - w0_half) * (mhz(6.985) - w0_half) > 0;
  report("second-order resonance location (within 2% of 6.97 MHz, same side as 6.985 MHz)",
         rel < 0.02 && same_side,
         fmt("located %.5f MHz, omega0/2 %.5f MHz, rel %.4f", to_mhz(located), to_mhz(w0_half), rel));
}

void population_formula() {
  DriveParamsd p = raman2;
  p.omega = resonance_locate(raman2, 2, 0.1 * raman2.omega0() / 2);
  const double omega_f = raman_rabi_frequency(p, 2, RabiMethod::QuasienergyGap);
  const EigenBasis basis = eigenbasis(p);
  const double period = kTwoPi / omega_f;
  const auto times = linspace(0.0, period, 4001);
  const TimeTrace trace = simulate_floquet_raman(p, basis.theta, times);
  // fast term at frequency `fast` with sign `sign`; the criterion is the bare-gap form
  auto deviation = [&](double fast, double sign, double span) {
    double worst = 0;
    for (std::size_t i = 0; i < times.size() && times[i] <= span; ++i) {
      const double t = times[i];
      const double model = 0.5 * (1 + std::cos(basis.theta) * std::cos(omega_f * t) -
                                  sign * std::sin(basis.theta) * std::sin(omega_f * t) * std::sin(fast * t));
      worst = std::max(worst, std::abs(trace.values[i] - model));
    }
    return worst;
  };
  const double worst = deviation(basis.omega0, 1, period);
  report("resonant population formula (max |dP0| < 0.05 over one Raman period)", worst < 0.05,
         fmt("max deviation %.4f at omega %.5f MHz, Omega_F %.5f MHz; diagnostics: half period %.4f, "
             "dressed gap 2*omega %.4f (sign -) %.4f (sign +)",
             worst, to_mhz(p.omega), to_mhz(omega_f), deviation(basis.omega0, 1, period / 2),
             deviation(2 * p.omega, 1, period), deviation(2 * p.omega, -1, period)));
}

void cross_method() {
  bool agree = true;
  std::string detail;
  auto check = [&](const char* label, const DriveParamsd& p) {
    const double ladder = raman_rabi_frequency(p, 2, RabiMethod::Ladder);
    const double gap = raman_rabi_frequency(p, 2, RabiMethod::QuasienergyGap);
    const double fit = raman_rabi_frequency(p, 2, RabiMethod::TimeFit);
    const double lo = std::min({ladder, gap, fit});
    const double hi = std::max({ladder, gap, fit});
    const double spread = hi / lo - 1;
    agree = agree && spread < 0.05;
    detail += fmt("%s ladder %.4f gap %.4f fit %.4f MHz (spread %.3f); ", label, to_mhz(ladder), to_mhz(gap),
                  to_mhz(fit), spread);
  };
  check("raman2", raman2);
  for (double a : {0.5, 1.5, 2.5}) {
    DriveParamsd p = amp_scan;
    p.amp_a = mhz(a);
    check(fmt("amp_scan A=%.1f", a).c_str(), p);
  }

  const std::vector<double> amps{mhz(0.2), mhz(0.4), mhz(0.5), mhz(1.0), mhz(1.5), mhz(2.0), mhz(2.5)};
  const ScanResult scan = scan_rabi_vs_amplitude(amps, amp_scan, 2);
  const auto& omega_f = scan.column("omega_f_fit");
  bool monotone = true;
  for (std::size_t i = 1; i < omega_f.size(); ++i) monotone = monotone && omega_f[i] > omega_f[i - 1];
  const double ratio = omega_f[1] / omega_f[0];
  const double expected = std::pow(amps[1] / amps[0], 2);
  const bool quadratic = std::abs(ratio / expected - 1) < 0.15;
  detail += fmt("scan monotone=%d, Omega_F(0.4)/Omega_F(0.2) = %.3f vs %.3f", monotone, ratio, expected);
  report("Omega_F cross-method agreement (< 5%), monotone in A, ~A^2 (15%)", agree && monotone && quadratic,
         detail);
}

void lorentzian_contrast() {
  const double center = contrast_scan.omega0() / 2;
  const auto omegas = linspace(center - mhz(0.8), center + mhz(0.8), 41);
  const ScanResult scan = scan_contrast_vs_frequency(omegas, contrast_scan, 2);
  const auto& c = scan.column("contrast");
  int peaks = 0;
  const double top = *std::max_element(c.begin(), c.end());
  for (std::size_t i = 1; i + 1 < c.size(); ++i)
    if (c[i] > c[i - 1] && c[i] >= c[i + 1] && c[i] > 0.5 * top) ++peaks;
  const double r2 = scan.summary_value("lorentz_r2");
  const double fit_center = scan.summary_value("lorentz_center");
  const double rel = std::abs(fit_center / center - 1);
  report("Lorentzian contrast (single peak, R^2 > 0.95, center within 2% of omega0/2)",
         peaks == 1 && r2 > 0.95 && rel < 0.02,
         fmt("peaks %d, R^2 %.4f, center %.5f MHz vs %.5f MHz (rel %.4f), gamma %.4f MHz", peaks, r2,
             to_mhz(fit_center), to_mhz(center), rel, to_mhz(scan.summary_value("lorentz_gamma"))));
}

void third_order() {
  const double omega_f = raman_rabi_frequency(raman3, 3, RabiMethod::QuasienergyGap);
  const double window = 3 * kTwoPi / omega_f;
  const double on = transfer_contrast(raman3, window);
  DriveParamsd mid = raman3;
  mid.omega = (raman3.omega0() / 3 + raman3.omega0() / 2) / 2;
  const double off = transfer_contrast(mid, window);
  report("third-order resonance (contrast > 0.3 at 4.657 MHz, < 0.05 midway)", on > 0.3 && off < 0.05,
         fmt("contrast %.4f at 4.657 MHz, %.4f at %.4f MHz (window %.2f us)", on, off, to_mhz(mid.omega),
             to_microseconds(window)));
}

void photon_assisted() {
  const auto times = linspace(0.0, microseconds(2.0), 2001);
  DriveParamsd modulated = modulated_drive;
  modulated.phase_mod_a = 4.35 * modulated_drive.phase_mod_nu;
  const TimeTrace with = simulate_photon_assisted(modulated, times);
  const TimeTrace without = simulate_photon_assisted(modulated_drive, times);
  const double t_with = first_crossing(with.times, with.lower_band, 0.5);
  const double t_without = first_crossing(without.times, without.lower_band, 0.5);

  const auto ratios = linspace(0.0, 8.0, 81);
  const std::vector<double> at{microseconds(0.20)};
  const ScanResult scan = scan_localization(modulated_drive, ratios, at);
  const auto& p = scan.columns.front().second;
  int maxima = 0;
  int deep_minima = 0;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    if (p[i] > p[i - 1] && p[i] > p[i + 1]) ++maxima;
    if (p[i] < p[i - 1] && p[i] < p[i + 1] && p[i] < 0.1) ++deep_minima;
  }
  report("photon-assisted enhancement and dynamical localization",
         t_with < t_without && maxima >= 1 && deep_minima >= 1,
         fmt("P_lower=0.5 at %.3f us (a=4.35nu) vs %.3f us (a=0); T=0.20 us scan: %d interior maxima, "
             "%d minima below 0.1 (min %.4f)",
             to_microseconds(t_with), to_microseconds(t_without), maxima, deep_minima,
             *std::min_element(p.begin(), p.end())));
}

void dephasing() {
  NoiseModel noise;
  noise.sigma_detuning = khz(40.0);
  noise.n_realizations = 1000;
  noise.seed = 7;
  const auto times = linspace(0.0, microseconds(15.0), 751);
  const TimeTrace trace = simulate_ramsey(mhz(1.0), times, noise);
  const FitResult fit = fit_ramsey(trace);
  const double t2 = to_microseconds(fit.params(2));
  report("Ramsey dephasing (1/e time in [3, 6] us)", t2 >= 3 && t2 <= 6,
         fmt("decay time %.3f us (Gaussian model sqrt(2)/sigma = %.3f us), R^2 %.4f", t2,
             to_microseconds(std::sqrt(2.0) / noise.sigma_detuning), fit.r_squared));
}

void non_adiabaticity() {
  const double param = adiabaticity_parameter(raman2);
  const double omega_f = raman_rabi_frequency(raman2, 2, RabiMethod::QuasienergyGap);
  const double contrast = transfer_contrast(raman2, 3 * kTwoPi / omega_f);
  report("anomalous non-adiabaticity (parameter < 0.2, contrast > 0.5)", param < 0.2 && contrast > 0.5,
         fmt("adiabaticity parameter %.4f, transfer contrast %.4f", param, contrast));
}

void structural(const fs::path& sim_exe) {
  std::string detail;
  bool pass = true;
  auto flag = [&](const char* what, bool ok, const std::string& value) {
    pass = pass && ok;
    detail += fmt("%s %s%s; ", what, value.c_str(), ok ? "" : " (FAIL)");
  };

  const double t1 = microseconds(1.0);
  const Propagator<double> u = propagate_unitary(raman2, 0.0, t1);
  flag("unitarity", u.unitarity_defect() < 1e-10, fmt("%.2e", u.unitarity_defect()));

  const SpinStated psi = propagate_state(eigenbasis(raman2).plus, raman2, 0.0, t1);
  flag("norm", std::abs(psi.norm() - 1) < 1e-9, fmt("%.2e", std::abs(psi.norm() - 1)));

  const double mid = microseconds(0.37);
  const Matrix2cd split = propagate_unitary(raman2, mid, t1).u * propagate_unitary(raman2, 0.0, mid).u;
  const double comp = (split - u.u).norm();
  flag("composition", comp < 1e-8, fmt("%.2e", comp));

  double fold_err = 0;
  for (double eps : {-0.49, -0.2, 0.0, 0.31, 0.4999})
    for (int k : {-3, -1, 1, 2, 5}) {
      const double w = raman2.omega;
      const double e = fold_quasienergy(eps * w, w);
      fold_err = std::max(fold_err, std::abs(fold_quasienergy(e + k * w, w) - e) / w);
      fold_err = std::max(fold_err, std::abs(fold_quasienergy(e, w) - e) / w);
    }
  flag("zone folding", fold_err < 1e-12, fmt("%.2e", fold_err));

  const double width = 0.1 * raman2.omega0() / 2;
  const double g6 = ladder_gap_minimum(raman2, 2, width, -3, 3).gap;
  const double g10 = ladder_gap_minimum(raman2, 2, width, -5, 5).gap;
  flag("ladder truncation 6->10", std::abs(g10 / g6 - 1) < 0.01, fmt("%.2e", std::abs(g10 / g6 - 1)));

  const double rwa = lab_frame_check(raman2, mhz(1445.8), microseconds(0.5));
  flag("RWA residual", rwa < 0.02, fmt("%.4f", rwa));

  const fs::path dir = fs::temp_directory_path() / "floquet_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "ramsey.ini");
    cfg << "experiment = ramsey\nseed = 11\n[drive]\ndelta_z_mhz = 1.0\n"
        << "[noise]\nsigma_detuning_khz = 40\nrealizations = 50\nreadout_shots = 200\n"
        << "[time]\nstop_us = 5\nstep_us = 0.05\n";
  }
  std::string outputs[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path out = dir / ("run" + std::to_string(run));
    const std::string cmd =
        "\"" + sim_exe.string() + "\" \"" + (dir / "ramsey.ini").string() + "\" --quiet --out \"" + out.string() + "\"";
    if (std::system(cmd.c_str()) != 0) throw std::runtime_error("sim exited nonzero: " + cmd);
    outputs[run] = read_file(out / "ramsey.csv");
  }
  flag("CLI seed determinism", !outputs[0].empty() && outputs[0] == outputs[1],
       fmt("%zu bytes", outputs[0].size()));
  fs::remove_all(dir);

  report("structural properties", pass, detail);
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path sim_exe = argc > 1 ? fs::path(argv[1]) : fs::path("sim");
  run("rabi", rabi_calibration);
  run("resonance", second_order_location);
  run("formula", population_formula);
  run("cross-method", cross_method);
  run("lorentzian", lorentzian_contrast);
  run("third-order", third_order);
  run("photon-assisted", photon_assisted);
  run("dephasing", dephasing);
  run("adiabaticity", non_adiabaticity);
  run("structural", [&] { structural(sim_exe); });
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
