#pragma once

#include <nlohmann/json.hpp>

#include <exception>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "superosc/harness/config.hpp"
#include "superosc/signal.hpp"

namespace superosc::harness {

inline const std::vector<std::string> kExperiments = {"synth",  "spectrum", "freq-map", "transition",
                                                      "detune", "energy",   "sweep"};

struct RunOptions {
  std::filesystem::path out_dir = "out";
  int jobs = 1;
  bool quiet = false;
  bool write_files = true;
};

struct RunRecord {
  std::string experiment;
  std::string config_hash;
  std::string tool_version;
  double wall_clock_seconds = 0.0;
  nlohmann::json config;
  nlohmann::json payload;
  std::vector<std::string> warnings;
  std::vector<std::string> files;
  std::shared_ptr<const SampledSignal> signal;  // synth only; not serialized

  nlohmann::json to_json() const;
};

class MissingPayload : public Error {
 public:
  using Error::Error;
};

std::string tool_version();

/// Validates the config for `experiment` and runs it; output files go to
/// options.out_dir when options.write_files is set.
RunRecord run_experiment(const std::string& experiment, const Config& config,
                         const RunOptions& options);

/// Fig.-1-style dataset with a region column; needs a synth record.
std::filesystem::path emit_figure_data(const RunRecord& record, const std::filesystem::path& dir);

/// One value list per varied key: "list:a,b,c", "lin:a:b:n" or "log:a:b:n".
std::vector<double> parse_range(const std::string& spec);

/// 0 success, 2 validation error, 3 assertion or numerical failure.
int exit_code_for(const std::exception& e);

}  // namespace superosc::harness
