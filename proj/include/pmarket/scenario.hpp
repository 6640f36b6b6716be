#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Dense>

#include "pmarket/errors.hpp"
#include "pmarket/finite_engine.hpp"
#include "pmarket/gaussian_engine.hpp"

namespace pmarket {

/// Invalid scenario file. what() is "<file>:<line>: <message>".
class ConfigError : public Error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct FiniteScenario {
  FiniteModel model;
  Assignment realization;
  Schedule schedule;
};

struct GaussianScenario {
  GaussianModel model;
  Eigen::VectorXd x;
  Eigen::VectorXd z;
  std::size_t max_rounds;
  ExpertBlock first;
};

struct MixtureScenario {
  double x1;
  double x2;
  double mu;
  std::size_t first_expert;
};

struct ScenarioConfig {
  std::variant<FiniteScenario, GaussianScenario, MixtureScenario> scenario;
  std::filesystem::path trace_path;
  std::filesystem::path report_path;
};

/// Environment variable naming the default directory for datasets.
inline constexpr const char* kDataDirEnv = "PMARKET_DATA_DIR";

/// Parses a YAML scenario. Relative dataset paths are resolved against
/// `base_dir`, then against $PMARKET_DATA_DIR. Throws ConfigError;
/// DatasetUnavailable when a referenced dataset cannot be found.
ScenarioConfig parse_scenario(std::string_view text, std::string_view source_name,
                              const std::filesystem::path& base_dir);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Runs a scenario file and writes its trace and report. Exit codes: 0 ok,
/// 2 config error, 3 engine error, 4 dataset unavailable.
int cmd_run(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);

}  // namespace pmarket
