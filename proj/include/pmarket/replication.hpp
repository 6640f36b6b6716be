#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pmarket/dataset.hpp"

namespace pmarket {

/// Expected number of complete cases in the 1993 new-car data.
inline constexpr std::size_t kCars93CompleteCases = 82;

/// One computed number next to its published value. The tolerance is half
/// a unit in the last printed decimal.
struct Comparison {
  std::string label;
  std::string published;
  double computed = 0.0;
  double tolerance = 0.0;
  bool ok = false;
};

Comparison compare_published(std::string label, std::string published, double computed);

/// The two experts' observations in the worked illustrations.
struct Illustration {
  Eigen::VectorXd x;
  Eigen::VectorXd z;
};
Illustration first_illustration();
Illustration second_illustration();

struct Table1Replication {
  std::size_t complete_cases = 0;
  std::size_t rounds_to_convergence = 0;
  std::vector<Comparison> comparisons;
  bool all_ok() const;
};

/// Fits the dispersion from the CSV and replays both illustrations.
/// Throws DatasetUnavailable, DatasetShapeMismatch, NonNumericCell.
Table1Replication replicate_table1(const std::filesystem::path& csv_path,
                                   const CsvOptions& options = {});

/// Prints the side-by-side table. Exit codes: 0 match, 1 mismatch,
/// 4 dataset unavailable or malformed.
int cmd_replicate_table1(const std::filesystem::path& csv_path, const CsvOptions& options,
                         std::ostream& out, std::ostream& err);

/// Guidance printed when the dataset cannot be found.
std::string dataset_instructions();

}  // namespace pmarket
