#ifndef FLOQUET_SCENARIO_HPP
#define FLOQUET_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "floquet/experiment.hpp"
#include "floquet/types.hpp"

namespace floquet {

/// Uniform time grid in seconds, endpoints inclusive when they fall on the grid.
struct TimeGrid {
  double start = 0;
  double stop = 0;
  double step = 0;

  std::vector<double> points() const;
};

/// A parsed and validated scenario. Frequencies are already in rad/s.
struct ScenarioConfig {
  std::string experiment;
  std::string name;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  DriveParamsd drive;
  NoiseModel noise;
  std::optional<TimeGrid> time;
  std::vector<double> scan;          ///< rad/s for frequency/amplitude scans, plain ratios for a/nu
  std::vector<double> sample_times;  ///< seconds, for fixed-time scans
  int order = 2;
  int n_min = -5;
  int n_max = 5;
  double prep_amp = mhz(20.0);
  std::optional<double> prep_theta;  ///< nullopt: prepare |+> (mixing angle)

  std::string source;                                       ///< original config text
  std::vector<std::pair<std::string, std::string>> entries;  ///< "section.key" -> raw value, in file order
};

inline constexpr std::string_view kOutputDirEnv = "FLOQUET_SIM_OUT";

const std::vector<std::string>& known_experiments();

/// Parses INI-style text: `key = value` lines, `[section]` headers, `#` or `;`
/// comments. Throws ParseError or ValidationError naming the key and line.
ScenarioConfig parse_config(std::string_view text);

ScenarioConfig load_config(const std::filesystem::path& path);

/// Runs the experiment and writes one CSV plus a JSON sidecar per output.
/// Returns the paths written, CSVs first.
std::vector<std::filesystem::path> run_scenario(const ScenarioConfig& config,
                                                const std::filesystem::path& out_dir);

/// CSV cell formatting with 17 significant digits, so values round-trip exactly.
std::string format_number(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace floquet

#endif  // FLOQUET_SCENARIO_HPP
