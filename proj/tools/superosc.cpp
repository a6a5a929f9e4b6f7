#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "superosc/errors.hpp"
#include "superosc/harness/experiments.hpp"

namespace sh = superosc::harness;

namespace {

void print_summary(const sh::RunRecord& r, const std::filesystem::path& out) {
  std::printf("%s  config %s  %.3f s\n", r.experiment.c_str(), r.config_hash.c_str(),
              r.wall_clock_seconds);
  const auto& p = r.payload;
  if (r.experiment == "synth") {
    std::printf("  route %s, value at z=0: %.10g%+.10gi\n", p["route"].get<std::string>().c_str(),
                p["value_at_zero"]["re"].get<double>(), p["value_at_zero"]["im"].get<double>());
  } else if (r.experiment == "spectrum") {
    std::printf("  leakage %.3e, certificate %s\n", p["leakage"].get<double>(),
                p["certificate"]["pass"].get<bool>() ? "pass" : "fail");
  } else if (r.experiment == "freq-map") {
    std::printf("  target %.6g, max rel error %.3e\n", p["target_wavenumber"].get<double>(),
                p["max_relative_error_middle_80"].get<double>());
  } else if (r.experiment == "transition") {
    std::printf("  exponent %.5f, mono deviation %.3e\n", p["fit"]["exponent"].get<double>(),
                p["monochromatic"]["max_relative_deviation"].get<double>());
  } else if (r.experiment == "detune") {
    std::printf("  selectivity %.6g\n", p["selectivity"].get<double>());
  } else if (r.experiment == "energy") {
    const auto& rep = p["report"];
    std::printf("  E_before log10 %.6f, I2/Omega %.6g, I3/Omega %.3e, r %.3e\n",
                p["energy_before"]["log10"].get<double>(), rep["i2_over_gap"].get<double>(),
                rep["i3_over_gap"].get<double>(), rep["residual"].get<double>());
  } else if (r.experiment == "sweep") {
    std::printf("  %zu points, %zu failed\n", p["points"].get<std::size_t>(),
                p["failures"].get<std::size_t>());
  }
  for (const auto& w : r.warnings) std::printf("  warning: %s\n", w.c_str());
  std::printf("  output: %s\n", out.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Superoscillation experiment harness"};
  std::string experiment;
  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  bool quiet = false;
  app.add_option("experiment", experiment, "synth | spectrum | freq-map | transition | detune | energy | sweep")
      ->required()
      ->check(CLI::IsMember(sh::kExperiments));
  app.add_option("--config", config_path, "INI config file")->required();
  app.add_option("--out", out_dir, "output directory (overrides SUPEROSC_OUT)");
  app.add_option("--jobs", jobs, "worker threads for sweep")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "no summary on stdout");
  app.set_version_flag("--version", sh::tool_version());
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const sh::Config config = sh::Config::load(config_path);
    sh::RunOptions options;
    options.jobs = jobs;
    options.quiet = quiet;
    if (!out_dir.empty()) {
      options.out_dir = out_dir;
    } else if (const char* env = std::getenv("SUPEROSC_OUT"); env && *env) {
      options.out_dir = env;
    } else {
      options.out_dir = config.text("output.dir", "out");
    }
    const sh::RunRecord record = sh::run_experiment(experiment, config, options);
    if (!quiet) print_summary(record, options.out_dir);
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "superosc %s: %s\n", experiment.c_str(), e.what());
    return sh::exit_code_for(e);
  }
}
