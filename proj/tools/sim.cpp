#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "floquet/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Floquet two-level spin simulator"};
  app.set_version_flag("--version", std::string(FLOQUET_VERSION));

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool quiet = false;
  app.add_option("config", config_path, "Scenario config file (INI)")->required();
  auto* out_opt = app.add_option("--out,-o", out_dir, "Output directory (default $FLOQUET_SIM_OUT or .)");
  auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");
  app.add_flag("--quiet,-q", quiet, "Print nothing on success");
  CLI11_PARSE(app, argc, argv);

  if (!*out_opt) {
    const char* env = std::getenv(std::string(floquet::kOutputDirEnv).c_str());
    out_dir = env && *env ? env : ".";
  }

  try {
    floquet::ScenarioConfig config = floquet::load_config(config_path);
    if (*seed_opt) {
      config.seed = seed;
      config.noise.seed = seed;
    }
    const auto written = floquet::run_scenario(config, out_dir);
    if (!quiet)
      for (const auto& path : written) std::cout << path.string() << '\n';
  } catch (const floquet::Error& e) {
    std::cerr << "sim: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "sim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
