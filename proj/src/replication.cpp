#include "pmarket/replication.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "pmarket/errors.hpp"
#include "pmarket/gaussian_engine.hpp"

namespace pmarket {

namespace {

constexpr const char* kPublishedU[] = {"40.62", "39.49", "39.34", "39.51",    "39.55",
                                       "39.54", "39.66", "39.75", "39.73917", "39.73925"};
constexpr const char* kPublishedV[] = {"38.28", "39.40", "39.46", "39.54",    "39.56",
                                       "39.63", "39.67", "39.74", "39.73924", "39.73925"};

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

double half_unit(const std::string& printed) {
  const auto dot = printed.find('.');
  const int decimals = dot == std::string::npos ? 0 : static_cast<int>(printed.size() - dot - 1);
  return 0.5 * std::pow(10.0, -decimals);
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace

Comparison compare_published(std::string label, std::string published, double computed) {
  Comparison c{std::move(label), std::move(published), computed, 0.0, false};
  c.tolerance = half_unit(c.published);
  // Absorb the binary representation error of the published decimal itself.
  c.ok = std::abs(computed - std::stod(c.published)) <= c.tolerance * (1 + 1e-9);
  return c;
}

Illustration first_illustration() {
  return {vec({16, 25, 2, 1, 8, 4.6, 295, 6000, 1985, 0, 20.0}),
          vec({5, 204, 111, 74, 44, 31.0, 14, 3935, 1})};
}

Illustration second_illustration() {
  return {vec({22, 30, 1, 0, 4, 3.5, 208, 5700, 2545, 1, 21.1}),
          vec({4, 186, 109, 69, 39, 27.0, 13, 3640, 0})};
}

bool Table1Replication::all_ok() const {
  for (const auto& c : comparisons) {
    if (!c.ok) return false;
  }
  return rounds_to_convergence == 10;
}

Table1Replication replicate_table1(const std::filesystem::path& csv_path,
                                   const CsvOptions& options) {
  const DispersionData data =
      load_dispersion(csv_path, cars93_layout(), kCars93CompleteCases, options);
  const GaussianModel& model = data.model;
  Table1Replication out;
  out.complete_cases = data.complete_cases;

  const Illustration one = first_illustration();
  out.comparisons.push_back(compare_published(
      "E1 pre-market", "40.6163", solo_forecast(model, ExpertBlock::x, one.x).mean()));
  out.comparisons.push_back(compare_published(
      "E2 pre-market", "30.6316", solo_forecast(model, ExpertBlock::z, one.z).mean()));
  out.comparisons.push_back(
      compare_published("pooled", "39.73925", pooled_gaussian(model, one.x, one.z).mean()));

  const LinearMarketTrace trace = run_linear_market(model, one.x, one.z, 50);
  out.rounds_to_convergence = trace.rounds_to_convergence;
  std::vector<double> u, v;
  for (const auto& e : trace.entries) {
    (e.expert == ExpertBlock::x ? u : v).push_back(e.forecast.mean());
  }
  for (std::size_t i = 0; i < 10; ++i) {
    const std::string round = std::to_string(i + 1);
    out.comparisons.push_back(compare_published("u" + round, kPublishedU[i],
                                                i < u.size() ? u[i] : std::nan("")));
    out.comparisons.push_back(compare_published("v" + round, kPublishedV[i],
                                                i < v.size() ? v[i] : std::nan("")));
  }

  const Illustration two = second_illustration();
  out.comparisons.push_back(compare_published(
      "second: E1 pre-market", "27.80968", solo_forecast(model, ExpertBlock::x, two.x).mean()));
  out.comparisons.push_back(compare_published(
      "second: E2 pre-market", "36.593865", solo_forecast(model, ExpertBlock::z, two.z).mean()));
  const LinearMarketTrace second = run_linear_market(model, two.x, two.z, 50);
  out.comparisons.push_back(
      compare_published("second: limit", "31.22983", second.limit().mean()));
  return out;
}

std::string dataset_instructions() {
  return "The replication needs the 1993 new-car data (93CARS) as a CSV file with the\n"
         "26 numeric columns in their documented order: column 5 midrange price,\n"
         "columns 7-17 the first expert's predictors, columns 18-26 the second's.\n"
         "Missing cells may be empty or NA; a header row is expected (--no-header\n"
         "otherwise). Pass the file with --data <path>, or place it as 93cars.csv in\n"
         "the directory named by PMARKET_DATA_DIR.\n";
}

int cmd_replicate_table1(const std::filesystem::path& csv_path, const CsvOptions& options,
                         std::ostream& out, std::ostream& err) {
  Table1Replication r;
  try {
    r = replicate_table1(csv_path, options);
  } catch (const DatasetUnavailable& e) {
    err << "error: " << e.what() << "\n" << dataset_instructions();
    return 4;
  } catch (const DatasetShapeMismatch& e) {
    err << "error: " << e.what() << "\n" << dataset_instructions();
    return 4;
  } catch (const NonNumericCell& e) {
    err << "error: " << e.what() << "\n" << dataset_instructions();
    return 4;
  }

  out << "complete cases: " << r.complete_cases << "\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-22s %12s %14s  %s\n", "quantity", "published", "computed",
                "match");
  out << line;
  for (const auto& c : r.comparisons) {
    std::snprintf(line, sizeof line, "%-22s %12s %14s  %s\n", c.label.c_str(),
                  c.published.c_str(), fixed(c.computed, 8).c_str(), c.ok ? "yes" : "NO");
    out << line;
  }
  out << "rounds to convergence: " << r.rounds_to_convergence << " (published 10)\n";
  const bool ok = r.all_ok();
  out << (ok ? "published values replicated" : "published values NOT replicated") << "\n";
  return ok ? 0 : 1;
}

}  // namespace pmarket
