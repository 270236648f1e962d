#include "floquet/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "floquet/floquet.hpp"
#include "floquet/numeric.hpp"

namespace floquet {

namespace {

using Json = nlohmann::ordered_json;

struct Entry {
  std::string value;
  int line;
};

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"", {"experiment", "name", "seed", "threads"}},
      {"drive",
       {"delta_z_mhz", "delta_x_mhz", "amp_a_mhz", "omega_mhz", "phase_mod_a_mhz", "phase_mod_ratio",
        "phase_mod_nu_mhz"}},
      {"noise", {"sigma_detuning_khz", "realizations", "readout_shots"}},
      {"time", {"start_us", "stop_us", "step_us"}},
      {"scan", {"start", "stop", "points", "values", "times_us", "order"}},
      {"prep", {"pulse_amp_mhz", "theta_rad"}},
      {"ladder", {"n_min", "n_max"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void invalid(const std::string& key, const std::string& reason, int line = 0) {
  std::ostringstream msg;
  msg << "key '" << key << "'";
  if (line > 0) msg << " (line " << line << ")";
  msg << ": " << reason;
  throw Error(ErrorKind::ValidationError, msg.str());
}

class Entries {
 public:
  explicit Entries(std::map<std::string, Entry> e) : entries_(std::move(e)) {}

  bool has(const std::string& key) const { return entries_.contains(key); }

  std::optional<double> number(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return parse_double(key, it->second);
  }

  double required(const std::string& key, const std::string& experiment) const {
    auto v = number(key);
    if (!v) invalid(key, "missing, required by experiment '" + experiment + "'");
    return *v;
  }

  std::optional<std::int64_t> integer(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    const std::string& s = it->second.value;
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) invalid(key, "expected an integer", it->second.line);
    return v;
  }

  std::vector<double> list(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return {};
    std::vector<double> out;
    std::stringstream ss(it->second.value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, {trim(item), it->second.line}));
    return out;
  }

  std::string text(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? std::string{} : it->second.value;
  }

  int line(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

 private:
  static double parse_double(const std::string& key, const Entry& e) {
    const std::string& s = e.value;
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
      invalid(key, "expected a finite number, got '" + s + "'", e.line);
    return v;
  }

  std::map<std::string, Entry> entries_;
};

struct ExperimentNeeds {
  std::vector<std::string> drive;
  bool time = false;
  bool scan = false;
  bool times = false;
};

const std::map<std::string, ExperimentNeeds>& needs() {
  static const std::map<std::string, ExperimentNeeds> table{
      {"ramsey", {{"drive.delta_z_mhz"}, true, false, false}},
      {"rabi", {{"drive.delta_z_mhz", "drive.delta_x_mhz"}, true, false, false}},
      {"raman",
       {{"drive.delta_z_mhz", "drive.delta_x_mhz", "drive.amp_a_mhz", "drive.omega_mhz"}, true, false, false}},
      {"raman3",
       {{"drive.delta_z_mhz", "drive.delta_x_mhz", "drive.amp_a_mhz", "drive.omega_mhz"}, true, false, false}},
      {"spectrum",
       {{"drive.delta_z_mhz", "drive.delta_x_mhz", "drive.amp_a_mhz", "drive.omega_mhz"}, false, false, false}},
      {"ladder",
       {{"drive.delta_z_mhz", "drive.delta_x_mhz", "drive.amp_a_mhz", "drive.omega_mhz"}, false, false, false}},
      {"scan-amp", {{"drive.delta_z_mhz", "drive.delta_x_mhz", "drive.omega_mhz"}, false, true, false}},
      {"scan-freq", {{"drive.delta_z_mhz", "drive.delta_x_mhz", "drive.amp_a_mhz"}, false, true, false}},
      {"photon-assisted",
       {{"drive.delta_z_mhz", "drive.delta_x_mhz", "drive.amp_a_mhz", "drive.omega_mhz", "drive.phase_mod_nu_mhz"},
        true,
        false,
        false}},
      {"localization",
       {{"drive.delta_z_mhz", "drive.delta_x_mhz", "drive.amp_a_mhz", "drive.omega_mhz", "drive.phase_mod_nu_mhz"},
        false,
        true,
        true}},
  };
  return table;
}

std::vector<double> scan_values(const Entries& e) {
  if (e.has("scan.values")) {
    if (e.has("scan.start") || e.has("scan.stop") || e.has("scan.points"))
      invalid("scan.values", "give either an explicit list or start/stop/points, not both", e.line("scan.values"));
    auto v = e.list("scan.values");
    if (v.empty()) invalid("scan.values", "empty list", e.line("scan.values"));
    return v;
  }
  if (!e.has("scan.start") && !e.has("scan.stop") && !e.has("scan.points")) return {};
  const double start = e.number("scan.start").value_or(0.0);
  if (!e.has("scan.stop")) invalid("scan.stop", "missing, required with scan.start");
  const double stop = *e.number("scan.stop");
  const auto points = e.integer("scan.points").value_or(41);
  if (points < 1) invalid("scan.points", "must be >= 1", e.line("scan.points"));
  if (stop < start) invalid("scan.stop", "must be >= scan.start", e.line("scan.stop"));
  return linspace(start, stop, static_cast<std::size_t>(points));
}

Json drive_json(const DriveParamsd& p) {
  return Json{{"delta_z_rad_s", p.delta_z},
              {"delta_x_rad_s", p.delta_x},
              {"amp_a_rad_s", p.amp_a},
              {"omega_rad_s", p.omega},
              {"phase_mod_a_rad_s", p.phase_mod_a},
              {"phase_mod_nu_rad_s", p.phase_mod_nu}};
}

Json noise_json(const NoiseModel& n) {
  Json j{{"sigma_detuning_rad_s", n.sigma_detuning}, {"n_realizations", n.n_realizations}, {"seed", n.seed}};
  if (n.readout_shots)
    j["readout_shots"] = *n.readout_shots;
  else
    j["readout_shots"] = "inf";
  return j;
}

struct Output {
  std::string suffix;  ///< appended to the scenario name, may be empty
  CsvTable table;
  Json results = Json::object();
};

std::vector<double> scaled(std::span<const double> v, double factor) {
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x *= factor;
  return out;
}

std::vector<double> to_mhz_all(std::span<const double> v) { return scaled(v, 1.0 / (kTwoPi * 1e6)); }

std::vector<Output> run_experiment(const ScenarioConfig& c) {
  const std::string& x = c.experiment;
  NoiseModel noise = c.noise;
  noise.seed = c.seed;
  noise.threads = c.threads;

  if (x == "ramsey" || x == "rabi") {
    const auto times = c.time->points();
    TimeTrace trace = x == "ramsey" ? simulate_ramsey(c.drive.delta_z, times, noise, c.prep_amp)
                                    : simulate_rabi(c.drive.delta_z, c.drive.delta_x, times, noise);
    Output out{"", {{"t_us", "p0"}, {scaled(trace.times, 1e6), trace.values}}};
    try {
      if (x == "ramsey") {
        const FitResult fit = fit_ramsey(trace);
        out.results = {{"fringe_mhz", to_mhz(fit.params(3))},
                       {"decay_time_us", to_microseconds(fit.params(2))},
                       {"fit_r2", fit.r_squared}};
      } else {
        const FitResult fit = fit_oscillation(trace);
        out.results = {{"rabi_mhz", to_mhz(fit.params(2))},
                       {"expected_rabi_mhz", to_mhz(c.drive.omega0())},
                       {"fit_r2", fit.r_squared}};
      }
    } catch (const Error& e) {
      out.results = {{"fit_error", e.what()}};
    }
    return {out};
  }

  if (x == "raman" || x == "raman3") {
    const auto times = c.time->points();
    const EigenBasis basis = eigenbasis(c.drive);
    const TimeTrace trace =
        simulate_floquet_raman(c.drive, c.prep_theta.value_or(basis.theta), times, noise, c.prep_amp);
    Output out{"", {{"t_us", "p0", "p0_filtered"},
                    {scaled(trace.times, 1e6), trace.values, slow_population_zero(trace, c.drive)}}};
    out.results = {{"theta_rad", basis.theta},
                   {"omega0_mhz", to_mhz(basis.omega0)},
                   {"bare_resonance_mhz", to_mhz(resonance_frequency(c.drive, x == "raman" ? 2 : 3))},
                   {"adiabaticity_parameter", adiabaticity_parameter(c.drive)},
                   {"description", trace.metadata.description}};
    return {out};
  }

  if (x == "spectrum") {
    std::vector<double> omegas = c.scan.empty() ? std::vector<double>{c.drive.omega} : c.scan;
    const auto eps = track_quasienergies(c.drive, omegas);
    std::vector<double> e1, e2, gap;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      e1.push_back(to_mhz(eps[i][0]));
      e2.push_back(to_mhz(eps[i][1]));
      gap.push_back(to_mhz(quasienergy_distance(eps[i][0], eps[i][1], omegas[i])));
    }
    Output out{"", {{"omega_mhz", "eps_1_mhz", "eps_2_mhz", "gap_mhz"}, {to_mhz_all(omegas), e1, e2, gap}}};
    return {out};
  }

  if (x == "ladder") {
    const LadderModel model = ladder_model(c.drive, c.n_min, c.n_max);
    Output levels{"_levels", {{"index", "band", "n", "energy_mhz"}, {{}, {}, {}, {}}}};
    for (std::size_t i = 0; i < model.levels.size(); ++i) {
      levels.table.columns[0].push_back(static_cast<double>(i));
      levels.table.columns[1].push_back(model.levels[i].band);
      levels.table.columns[2].push_back(model.levels[i].n);
      levels.table.columns[3].push_back(to_mhz(model.levels[i].energy));
    }
    Output couplings{"_couplings", {{"row", "col", "re_mhz", "im_mhz", "abs_mhz"}, {{}, {}, {}, {}, {}}}};
    for (Eigen::Index r = 0; r < model.couplings.rows(); ++r) {
      for (Eigen::Index col = r + 1; col < model.couplings.cols(); ++col) {
        const auto v = model.couplings(r, col);
        if (v == std::complex<double>(0, 0)) continue;
        auto& cols = couplings.table.columns;
        cols[0].push_back(static_cast<double>(r));
        cols[1].push_back(static_cast<double>(col));
        cols[2].push_back(to_mhz(v.real()));
        cols[3].push_back(to_mhz(v.imag()));
        cols[4].push_back(to_mhz(std::abs(v)));
      }
    }
    try {
      levels.results["pair_splitting_mhz"] = to_mhz(ladder_pair_splitting(c.drive, c.order, c.n_min, c.n_max));
    } catch (const Error& e) {
      levels.results["pair_splitting_error"] = e.what();
    }
    return {levels, couplings};
  }

  if (x == "scan-amp") {
    const ScanResult scan = scan_rabi_vs_amplitude(c.scan, c.drive, c.order, c.threads);
    Output out{"",
               {{"amp_a_mhz", "resonance_mhz", "omega_f_fit_mhz", "omega_f_ladder_mhz", "omega_f_gap_mhz", "fit_r2"},
                {to_mhz_all(scan.values), to_mhz_all(scan.column("resonance")),
                 to_mhz_all(scan.column("omega_f_fit")), to_mhz_all(scan.column("omega_f_ladder")),
                 to_mhz_all(scan.column("omega_f_gap")), scan.column("fit_r2")}}};
    return {out};
  }

  if (x == "scan-freq") {
    const ScanResult scan = scan_contrast_vs_frequency(c.scan, c.drive, c.order, c.threads);
    Output out{"", {{"omega_mhz", "contrast", "lorentzian"},
                    {to_mhz_all(scan.values), scan.column("contrast"), scan.column("lorentzian")}}};
    out.results = {{"lorentz_center_mhz", to_mhz(scan.summary_value("lorentz_center"))},
                   {"lorentz_gamma_mhz", to_mhz(scan.summary_value("lorentz_gamma"))},
                   {"lorentz_height", scan.summary_value("lorentz_height")},
                   {"lorentz_r2", scan.summary_value("lorentz_r2")},
                   {"window_us", to_microseconds(scan.summary_value("window"))},
                   {"bare_resonance_mhz", to_mhz(resonance_frequency(c.drive, c.order))}};
    return {out};
  }

  if (x == "photon-assisted") {
    const auto times = c.time->points();
    const TimeTrace modulated = simulate_photon_assisted(c.drive, times, noise);
    DriveParamsd plain = c.drive;
    plain.phase_mod_a = 0;
    const TimeTrace unmodulated = simulate_photon_assisted(plain, times, noise);
    Output out{"", {{"t_us", "p_upper", "p_upper_unmodulated"},
                    {scaled(times, 1e6), modulated.values, unmodulated.values}}};
    out.results = {{"a_over_nu", c.drive.phase_mod_a / c.drive.phase_mod_nu}};
    return {out};
  }

  if (x == "localization") {
    const ScanResult scan = scan_localization(c.drive, c.scan, c.sample_times, c.threads);
    Output out{"", {{"a_over_nu"}, {scan.values}}};
    for (const auto& [name, col] : scan.columns) {
      out.table.header.push_back(name);
      out.table.columns.push_back(col);
    }
    return {out};
  }

  throw Error(ErrorKind::ValidationError, "unknown experiment '" + x + "'");
}

}  // namespace

std::vector<double> TimeGrid::points() const {
  std::vector<double> out;
  if (step <= 0) return out;
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step * (1 + 1e-12))) + 1;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(start + step * static_cast<double>(k));
  return out;
}

const std::vector<std::string>& known_experiments() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, _] : needs()) v.push_back(name);
    return v;
  }();
  return names;
}

ScenarioConfig parse_config(std::string_view text) {
  std::map<std::string, Entry> entries;
  ScenarioConfig config;
  config.source = std::string(text);
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!allowed_keys().contains(section))
        throw Error(ErrorKind::ValidationError,
                    "line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (!allowed_keys().at(section).contains(key)) invalid(full, "unknown key", line_no);
    if (value.empty()) invalid(full, "empty value", line_no);
    if (entries.contains(full)) invalid(full, "duplicate key", line_no);
    entries.emplace(full, Entry{value, line_no});
    config.entries.emplace_back(full, value);
  }

  const Entries e(std::move(entries));
  config.experiment = e.text("experiment");
  if (config.experiment.empty()) invalid("experiment", "missing");
  if (!needs().contains(config.experiment))
    invalid("experiment", "unknown experiment '" + config.experiment + "'", e.line("experiment"));
  const ExperimentNeeds& need = needs().at(config.experiment);

  config.name = e.has("name") ? e.text("name") : config.experiment;
  if (config.name.find_first_of("/\\") != std::string::npos) invalid("name", "must be a plain file stem", e.line("name"));
  if (auto s = e.integer("seed")) {
    if (*s < 0) invalid("seed", "must be >= 0", e.line("seed"));
    config.seed = static_cast<std::uint64_t>(*s);
  }
  if (auto t = e.integer("threads")) {
    if (*t < 0) invalid("threads", "must be >= 0", e.line("threads"));
    config.threads = static_cast<unsigned>(*t);
  }

  for (const auto& key : need.drive) e.required(key, config.experiment);
  DriveParamsd& d = config.drive;
  d.delta_z = mhz(e.number("drive.delta_z_mhz").value_or(0.0));
  d.delta_x = mhz(e.number("drive.delta_x_mhz").value_or(0.0));
  d.amp_a = mhz(e.number("drive.amp_a_mhz").value_or(0.0));
  d.phase_mod_nu = mhz(e.number("drive.phase_mod_nu_mhz").value_or(0.0));
  if (d.delta_x < 0) invalid("drive.delta_x_mhz", "must be >= 0", e.line("drive.delta_x_mhz"));
  if (d.amp_a < 0) invalid("drive.amp_a_mhz", "must be >= 0", e.line("drive.amp_a_mhz"));
  if (d.phase_mod_nu < 0) invalid("drive.phase_mod_nu_mhz", "must be >= 0", e.line("drive.phase_mod_nu_mhz"));
  if (e.has("drive.omega_mhz")) {
    d.omega = mhz(*e.number("drive.omega_mhz"));
    if (!(d.omega > 0)) invalid("drive.omega_mhz", "must be > 0", e.line("drive.omega_mhz"));
  } else {
    // only experiments that scan or ignore omega get here
    d.omega = std::max(d.omega0() / config.order, 1.0);
  }
  if (e.has("drive.phase_mod_a_mhz") && e.has("drive.phase_mod_ratio"))
    invalid("drive.phase_mod_ratio", "give either phase_mod_a_mhz or phase_mod_ratio", e.line("drive.phase_mod_ratio"));
  if (auto a = e.number("drive.phase_mod_a_mhz")) d.phase_mod_a = mhz(*a);
  if (auto r = e.number("drive.phase_mod_ratio")) d.phase_mod_a = *r * d.phase_mod_nu;
  if (d.phase_mod_a < 0) invalid("drive.phase_mod_a_mhz", "must be >= 0");
  if (d.phase_mod_a > 0 && !(d.phase_mod_nu > 0))
    invalid("drive.phase_mod_nu_mhz", "must be > 0 when phase modulation is enabled");

  NoiseModel& n = config.noise;
  n.sigma_detuning = khz(e.number("noise.sigma_detuning_khz").value_or(0.0));
  if (n.sigma_detuning < 0) invalid("noise.sigma_detuning_khz", "must be >= 0", e.line("noise.sigma_detuning_khz"));
  if (auto r = e.integer("noise.realizations")) {
    if (*r < 1) invalid("noise.realizations", "must be >= 1", e.line("noise.realizations"));
    n.n_realizations = static_cast<int>(*r);
  }
  if (e.has("noise.readout_shots") && e.text("noise.readout_shots") != "inf") {
    auto shots = e.integer("noise.readout_shots");
    if (*shots < 1) invalid("noise.readout_shots", "must be >= 1 or 'inf'", e.line("noise.readout_shots"));
    n.readout_shots = *shots;
  }
  n.seed = config.seed;
  n.threads = config.threads;

  if (need.time) {
    const double start = e.number("time.start_us").value_or(0.0);
    const double stop = e.required("time.stop_us", config.experiment);
    const double step = e.required("time.step_us", config.experiment);
    if (start < 0) invalid("time.start_us", "negative time", e.line("time.start_us"));
    if (stop < start) invalid("time.stop_us", "negative duration (stop before start)", e.line("time.stop_us"));
    if (!(step > 0)) invalid("time.step_us", "must be > 0", e.line("time.step_us"));
    if ((stop - start) / step > 5e6) invalid("time.step_us", "more than 5e6 samples", e.line("time.step_us"));
    config.time = TimeGrid{microseconds(start), microseconds(stop), microseconds(step)};
  }

  if (auto m = e.integer("scan.order")) {
    if (*m < 1) invalid("scan.order", "must be >= 1", e.line("scan.order"));
    config.order = static_cast<int>(*m);
    if (!e.has("drive.omega_mhz")) d.omega = std::max(d.omega0() / config.order, 1.0);
  }
  std::vector<double> scan = scan_values(e);
  if (need.scan && scan.empty()) invalid("scan.values", "missing, required by experiment '" + config.experiment + "'");
  const bool ratio_scan = config.experiment == "localization";
  for (double v : scan) {
    if (v < 0) invalid("scan.values", "scan values must be >= 0");
    config.scan.push_back(ratio_scan ? v : mhz(v));
  }
  if (config.experiment == "scan-freq")
    for (double w : config.scan)
      if (!(w > 0)) invalid("scan.values", "drive frequencies must be > 0");

  if (need.times) {
    if (!e.has("scan.times_us")) invalid("scan.times_us", "missing, required by experiment 'localization'");
    for (double t : e.list("scan.times_us")) {
      if (!(t >= 0)) invalid("scan.times_us", "negative time", e.line("scan.times_us"));
      config.sample_times.push_back(microseconds(t));
    }
  }

  if (auto amp = e.number("prep.pulse_amp_mhz")) {
    if (!(*amp > 0)) invalid("prep.pulse_amp_mhz", "must be > 0", e.line("prep.pulse_amp_mhz"));
    config.prep_amp = mhz(*amp);
  }
  if (auto th = e.number("prep.theta_rad")) config.prep_theta = *th;

  config.n_min = static_cast<int>(e.integer("ladder.n_min").value_or(-5));
  config.n_max = static_cast<int>(e.integer("ladder.n_max").value_or(5));
  if (config.n_max - config.n_min < 2) invalid("ladder.n_max", "need n_max - n_min >= 2", e.line("ladder.n_max"));

  const bool needs_theta = config.experiment != "ramsey" && config.experiment != "rabi";
  if (needs_theta && !(d.omega0() > 0))
    invalid("drive.delta_z_mhz", "delta_z and delta_x are both zero (degenerate system)");
  return config;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::PreconditionViolated, "cannot write " + path.string());
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  const std::size_t rows = table.columns.empty() ? 0 : table.columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << format_number(table.columns[c][r]);
    out << '\n';
  }
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) return table;
  std::stringstream header(line);
  std::string cell;
  while (std::getline(header, cell, ',')) table.header.push_back(cell);
  table.columns.resize(table.header.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::size_t c = 0;
    while (std::getline(row, cell, ',')) {
      if (c >= table.columns.size()) throw Error(ErrorKind::ParseError, "row wider than header in " + path.string());
      table.columns[c++].push_back(std::strtod(cell.c_str(), nullptr));
    }
  }
  return table;
}

std::vector<std::filesystem::path> run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir) {
  const auto wall_start = std::chrono::steady_clock::now();
  const std::vector<Output> outputs = run_experiment(config);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();

  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> csvs;
  std::vector<std::filesystem::path> sidecars;
  for (const Output& out : outputs) {
    const std::string stem = config.name + out.suffix;
    const auto csv_path = out_dir / (stem + ".csv");
    write_csv(csv_path, out.table);

    Json sidecar;
    sidecar["experiment"] = config.experiment;
    sidecar["csv"] = csv_path.filename().string();
    sidecar["columns"] = out.table.header;
    sidecar["library_version"] = FLOQUET_VERSION;
    sidecar["seed"] = config.seed;
    sidecar["wall_clock_s"] = wall;
    Json cfg = Json::object();
    for (const auto& [key, value] : config.entries) cfg[key] = value;
    sidecar["config"] = cfg;
    sidecar["config_text"] = config.source;
    Json resolved{{"drive", drive_json(config.drive)}, {"noise", noise_json(config.noise)}};
    if (config.time)
      resolved["time_s"] = {{"start", config.time->start}, {"stop", config.time->stop}, {"step", config.time->step}};
    if (!config.scan.empty()) resolved["scan"] = config.scan;
    if (!config.sample_times.empty()) resolved["sample_times_s"] = config.sample_times;
    resolved["order"] = config.order;
    resolved["prep_amp_rad_s"] = config.prep_amp;
    sidecar["resolved"] = resolved;
    sidecar["results"] = out.results;

    const auto json_path = out_dir / (stem + ".json");
    std::ofstream js(json_path, std::ios::binary);
    if (!js) throw Error(ErrorKind::PreconditionViolated, "cannot write " + json_path.string());
    js << sidecar.dump(2) << '\n';
    csvs.push_back(csv_path);
    sidecars.push_back(json_path);
  }
  csvs.insert(csvs.end(), sidecars.begin(), sidecars.end());
  return csvs;
}

}  // namespace floquet
