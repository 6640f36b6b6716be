#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pmarket/replication.hpp"
#include "pmarket/scenario.hpp"
#include "pmarket/verify.hpp"

namespace {

std::filesystem::path default_dataset() {
  const char* dir = std::getenv(pmarket::kDataDirEnv);
  if (dir == nullptr || *dir == '\0') return {};
  return std::filesystem::path(dir) / "93cars.csv";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate prediction markets of Bayesian experts"};
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "Run a scenario file and write its trace and report");
  run->add_option("config", config, "YAML scenario file")->required();

  std::string suite_name;
  std::uint64_t seed = 1;
  std::size_t count = 100;
  auto* verify = app.add_subcommand("verify", "Run a randomized property suite");
  verify->add_option("suite", suite_name, "all, martingale, vacuity, bounds or mixture")
      ->required()
      ->check(CLI::IsMember({"all", "martingale", "vacuity", "bounds", "mixture"}));
  verify->add_option("--seed", seed, "Seed for every generated model");
  verify->add_option("--count", count, "Generated cases per property");

  std::string data;
  bool no_header = false;
  std::string missing = "NA";
  auto* replicate = app.add_subcommand(
      "replicate-table1", "Replay the car-price market and compare with the published values");
  replicate->add_option("--data", data,
                        std::string("93CARS CSV (default $") + pmarket::kDataDirEnv +
                            "/93cars.csv)");
  replicate->add_flag("--no-header", no_header, "The CSV has no header row");
  replicate->add_option("--missing", missing, "Token marking a missing cell");

  CLI11_PARSE(app, argc, argv);

  if (*run) return pmarket::cmd_run(config, std::cout, std::cerr);
  if (*verify) return pmarket::cmd_verify(*pmarket::parse_suite(suite_name), seed, count, std::cout);

  const std::filesystem::path path = data.empty() ? default_dataset() : std::filesystem::path(data);
  if (path.empty()) {
    std::cerr << "error: no dataset given\n" << pmarket::dataset_instructions();
    return 4;
  }
  pmarket::CsvOptions options;
  options.header = !no_header;
  options.missing_sentinel = missing;
  return pmarket::cmd_replicate_table1(path, options, std::cout, std::cerr);
}
