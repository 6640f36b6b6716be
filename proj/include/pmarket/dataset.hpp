#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pmarket/gaussian_engine.hpp"

namespace pmarket {

struct CsvOptions {
  bool header = true;
  char delimiter = ',';
  /// Cells equal to this (after trimming) count as missing, as do empty cells.
  std::string missing_sentinel = "NA";
};

/// 1-based column numbers of the X block, the Z block and the target.
struct DatasetLayout {
  std::vector<std::size_t> x_columns;
  std::vector<std::size_t> z_columns;
  std::size_t y_column = 0;
};

/// X = columns 7..17, Z = 18..26, Y = column 5 (midrange price) of the
/// 26-column 1993 new-car data.
DatasetLayout cars93_layout();

/// Splits CSV text into rows of cells. Double-quoted cells may contain the
/// delimiter and "" escapes. Blank lines are skipped.
std::vector<std::vector<std::string>> read_csv(std::istream& in, char delimiter = ',');

struct DispersionData {
  GaussianModel model;
  std::size_t complete_cases;
};

/// Builds the zero-mean model with dispersion (1/n) sum_r w_r w_r^T over the
/// complete cases (uncorrected, not mean-centred), W ordered (X, Z, Y).
/// Throws DatasetShapeMismatch (missing columns, no complete case, or
/// n != n_expected) and NonNumericCell.
DispersionData dispersion_from_rows(const std::vector<std::vector<std::string>>& rows,
                                    const DatasetLayout& layout,
                                    std::optional<std::size_t> n_expected,
                                    const CsvOptions& options = {});

/// Reads the file and calls dispersion_from_rows. Throws DatasetUnavailable
/// if it cannot be opened.
DispersionData load_dispersion(const std::filesystem::path& csv_path, const DatasetLayout& layout,
                               std::optional<std::size_t> n_expected,
                               const CsvOptions& options = {});

}  // namespace pmarket
