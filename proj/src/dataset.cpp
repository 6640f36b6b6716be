#include "pmarket/dataset.hpp"

#include <charconv>
#include <fstream>
#include <istream>

#include "pmarket/errors.hpp"

namespace pmarket {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::size_t> column_span(std::size_t first, std::size_t last) {
  std::vector<std::size_t> out;
  for (std::size_t c = first; c <= last; ++c) out.push_back(c);
  return out;
}

}  // namespace

DatasetLayout cars93_layout() { return {column_span(7, 17), column_span(18, 26), 5}; }

std::vector<std::vector<std::string>> read_csv(std::istream& in, char delimiter) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool any = false;
  char c;
  auto end_row = [&] {
    if (any || !cell.empty() || !row.empty()) {
      row.push_back(cell);
      rows.push_back(std::move(row));
    }
    row.clear();
    cell.clear();
    any = false;
  };
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          cell += '"';
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == delimiter) {
      row.push_back(cell);
      cell.clear();
      any = true;
    } else if (c == '\n') {
      end_row();
    } else if (c != '\r') {
      cell += c;
    }
  }
  end_row();
  return rows;
}

DispersionData dispersion_from_rows(const std::vector<std::vector<std::string>>& rows,
                                    const DatasetLayout& layout,
                                    std::optional<std::size_t> n_expected,
                                    const CsvOptions& options) {
  std::vector<std::size_t> columns = layout.x_columns;
  columns.insert(columns.end(), layout.z_columns.begin(), layout.z_columns.end());
  columns.push_back(layout.y_column);
  for (auto c : columns) {
    if (c == 0) throw DatasetShapeMismatch("column numbers are 1-based");
  }
  const auto dim = static_cast<Eigen::Index>(columns.size());

  std::vector<std::string> names;
  std::size_t first_data = 0;
  if (options.header && !rows.empty()) {
    first_data = 1;
    for (auto c : columns) {
      names.push_back(c <= rows[0].size() ? trim(rows[0][c - 1]) : "col" + std::to_string(c));
    }
  }

  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(dim, dim);
  std::size_t n = 0;
  Eigen::VectorXd w(dim);
  for (std::size_t r = first_data; r < rows.size(); ++r) {
    const auto& row = rows[r];
    bool complete = true;
    for (Eigen::Index i = 0; i < dim; ++i) {
      const std::size_t c = columns[static_cast<std::size_t>(i)];
      if (c > row.size()) {
        throw DatasetShapeMismatch("row " + std::to_string(r + 1) + " has " +
                                   std::to_string(row.size()) + " cells, column " +
                                   std::to_string(c) + " requested");
      }
      const std::string cell = trim(row[c - 1]);
      if (cell.empty() || cell == options.missing_sentinel) {
        complete = false;
        continue;
      }
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw NonNumericCell("row " + std::to_string(r + 1) + ", column " + std::to_string(c) +
                             ": '" + cell + "' is not numeric");
      }
      w(i) = value;
    }
    if (!complete) continue;
    sums.noalias() += w * w.transpose();
    ++n;
  }
  if (n == 0) throw DatasetShapeMismatch("no complete cases in the selected columns");
  if (n_expected && *n_expected != n) {
    throw DatasetShapeMismatch("found " + std::to_string(n) + " complete cases, expected " +
                               std::to_string(*n_expected));
  }
  if (names.size() != columns.size()) names.clear();
  return {GaussianModel(layout.x_columns.size(), layout.z_columns.size(), Eigen::VectorXd::Zero(dim),
                        sums / static_cast<double>(n), std::move(names)),
          n};
}

DispersionData load_dispersion(const std::filesystem::path& csv_path, const DatasetLayout& layout,
                               std::optional<std::size_t> n_expected, const CsvOptions& options) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw DatasetUnavailable("cannot open dataset '" + csv_path.string() + "'");
  return dispersion_from_rows(read_csv(in, options.delimiter), layout, n_expected, options);
}

}  // namespace pmarket
