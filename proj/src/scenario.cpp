#include "pmarket/scenario.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "pmarket/dataset.hpp"
#include "pmarket/protocol.hpp"
#include "pmarket/serialize.hpp"

namespace pmarket {

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : Error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

namespace {

class Reader {
 public:
  Reader(std::string source, std::filesystem::path base_dir)
      : source_(std::move(source)), base_dir_(std::move(base_dir)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& message) const {
    const int line = at.IsDefined() && at.Mark().line >= 0 ? at.Mark().line + 1 : 1;
    throw ConfigError(source_, line, message);
  }

  YAML::Node require(const YAML::Node& parent, const char* key) const {
    const YAML::Node n = parent[key];
    if (!n.IsDefined() || n.IsNull()) fail(parent, std::string("missing key '") + key + "'");
    return n;
  }

  template <typename T>
  T scalar(const YAML::Node& n, const char* what) const {
    if (!n.IsScalar()) fail(n, std::string(what) + " must be a scalar");
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, std::string("cannot read ") + what + " from '" + n.Scalar() + "'");
    }
  }

  template <typename T>
  T scalar_or(const YAML::Node& parent, const char* key, T fallback) const {
    const YAML::Node n = parent[key];
    if (!n.IsDefined() || n.IsNull()) return fallback;
    return scalar<T>(n, key);
  }

  Rational rational(const YAML::Node& n, const char* what) const {
    const auto text = scalar<std::string>(n, what);
    try {
      return Rational::parse(text);
    } catch (const std::exception&) {
      fail(n, std::string(what) + " must be written num/den, got '" + text + "'");
    }
  }

  std::vector<double> doubles(const YAML::Node& n, const char* what) const {
    if (!n.IsSequence()) fail(n, std::string(what) + " must be a list of numbers");
    std::vector<double> out;
    for (const auto& item : n) out.push_back(scalar<double>(item, what));
    return out;
  }

  Eigen::VectorXd vector(const YAML::Node& n, const char* what) const {
    const auto v = doubles(n, what);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  // A list of column numbers; entries may be ranges written "a-b".
  std::vector<std::size_t> columns(const YAML::Node& n, const char* what) const {
    std::vector<std::size_t> out;
    auto add = [&](const YAML::Node& item) {
      const auto text = scalar<std::string>(item, what);
      const auto dash = text.find('-');
      try {
        if (dash == std::string::npos) {
          out.push_back(std::stoul(text));
        } else {
          const auto lo = std::stoul(text.substr(0, dash));
          const auto hi = std::stoul(text.substr(dash + 1));
          if (hi < lo) fail(item, std::string("empty column range in ") + what);
          for (auto c = lo; c <= hi; ++c) out.push_back(c);
        }
      } catch (const std::logic_error&) {
        fail(item, std::string("bad column spec '") + text + "' in " + what);
      }
    };
    if (n.IsSequence()) {
      for (const auto& item : n) add(item);
    } else {
      add(n);
    }
    return out;
  }

  std::filesystem::path output(const YAML::Node& root, const char* key,
                               const std::filesystem::path& fallback) const {
    const YAML::Node out = root["output"];
    if (!out.IsDefined() || out.IsNull()) return fallback;
    if (!out.IsMap()) fail(out, "output must be a mapping");
    return scalar_or<std::string>(out, key, fallback.string());
  }

  std::filesystem::path dataset_path(const YAML::Node& n) const {
    const std::filesystem::path p = scalar<std::string>(n, "dataset path");
    if (p.is_absolute()) return p;
    if (std::filesystem::exists(base_dir_ / p)) return base_dir_ / p;
    if (const char* dir = std::getenv(kDataDirEnv); dir != nullptr && *dir != '\0') {
      if (std::filesystem::exists(std::filesystem::path(dir) / p)) {
        return std::filesystem::path(dir) / p;
      }
    }
    return base_dir_ / p;
  }

  FiniteScenario finite(const YAML::Node& root) const;
  GaussianScenario gaussian(const YAML::Node& root) const;
  MixtureScenario mixture(const YAML::Node& root) const;

 private:
  FiniteModel finite_model(const YAML::Node& model) const;
  FiniteModel inline_finite_model(const YAML::Node& model) const;
  Assignment finite_realization(const FiniteModel& model, const YAML::Node& root) const;

  std::string source_;
  std::filesystem::path base_dir_;
};

FiniteModel Reader::inline_finite_model(const YAML::Node& model) const {
  const YAML::Node vars = require(model, "variables");
  if (!vars.IsSequence()) fail(vars, "variables must be a list of {name, values}");
  std::vector<Variable> variables;
  for (const auto& v : vars) {
    Variable var{scalar<std::string>(require(v, "name"), "variable name"), {}};
    for (double x : doubles(require(v, "values"), "variable values")) {
      var.values.push_back(static_cast<int>(x));
    }
    variables.push_back(std::move(var));
  }

  const YAML::Node atoms_node = require(model, "atoms");
  if (!atoms_node.IsSequence()) fail(atoms_node, "atoms must be a list");
  std::vector<Atom> atoms;
  for (const auto& a : atoms_node) {
    const YAML::Node assign = require(a, "assignment");
    Assignment values;
    if (assign.IsSequence()) {
      for (const auto& x : assign) values.push_back(scalar<int>(x, "assignment value"));
    } else if (assign.IsMap()) {
      values.assign(variables.size(), 0);
      if (assign.size() != variables.size()) fail(assign, "assignment must name every variable");
      for (const auto& kv : assign) {
        const auto name = kv.first.as<std::string>();
        std::size_t idx = variables.size();
        for (std::size_t i = 0; i < variables.size(); ++i) {
          if (variables[i].name == name) idx = i;
        }
        if (idx == variables.size()) fail(kv.first, "unknown variable '" + name + "'");
        values[idx] = scalar<int>(kv.second, "assignment value");
      }
    } else {
      fail(assign, "assignment must be a list or a mapping");
    }
    atoms.push_back({std::move(values), rational(require(a, "weight"), "atom weight")});
  }

  std::vector<ExpertSpec> experts;
  const YAML::Node experts_node = require(model, "experts");
  if (!experts_node.IsSequence()) fail(experts_node, "experts must be a list");
  for (const auto& e : experts_node) {
    ExpertSpec spec{scalar<std::string>(require(e, "private"), "private variable"), std::nullopt};
    if (const YAML::Node c = e["comment"]; c.IsDefined() && !c.IsNull()) {
      if (!c.IsMap()) fail(c, "comment must map private values to comment values");
      std::map<int, int> k;
      for (const auto& kv : c) k[scalar<int>(kv.first, "comment key")] = scalar<int>(kv.second, "comment");
      spec.comment = std::move(k);
    }
    experts.push_back(std::move(spec));
  }

  try {
    OutcomeTable table = scalar_or<bool>(model, "normalize", false)
                             ? OutcomeTable::normalized(std::move(variables), std::move(atoms))
                             : OutcomeTable(std::move(variables), std::move(atoms));
    return FiniteModel(std::move(table), scalar<std::string>(require(model, "target"), "target"),
                       std::move(experts));
  } catch (const InvalidModel& e) {
    fail(model, e.what());
  }
}

FiniteModel Reader::finite_model(const YAML::Node& model) const {
  if (!model.IsMap()) fail(model, "model must be a mapping");
  const YAML::Node builder = model["builder"];
  if (!builder.IsDefined()) return inline_finite_model(model);
  const auto name = scalar<std::string>(builder, "builder");
  if (name == "parity") return build_parity_model();
  if (name == "overlapping_bernoulli") {
    auto count = [&](const char* key) {
      const int n = scalar<int>(require(model, key), key);
      if (n < 0) fail(model[key], std::string(key) + " must be non-negative");
      return static_cast<unsigned>(n);
    };
    return build_overlapping_bernoulli(count("n0"), count("n1"), count("n2"));
  }
  fail(builder, "unknown builder '" + name + "' (parity, overlapping_bernoulli)");
}

Assignment Reader::finite_realization(const FiniteModel& model, const YAML::Node& root) const {
  const YAML::Node r = require(root, "realization");
  if (!r.IsMap()) fail(r, "realization must map variable names to values");
  std::vector<std::pair<std::size_t, int>> fixed;
  for (const auto& kv : r) {
    const auto name = kv.first.as<std::string>();
    if (!model.table().has_variable(name)) fail(kv.first, "unknown variable '" + name + "'");
    fixed.emplace_back(model.table().index_of(name), scalar<int>(kv.second, "realized value"));
  }
  for (const auto& atom : model.table().atoms()) {
    bool match = true;
    for (const auto& [idx, value] : fixed) match = match && atom.assignment[idx] == value;
    if (match) return atom.assignment;
  }
  fail(r, "realization has probability zero under the model");
}

FiniteScenario Reader::finite(const YAML::Node& root) const {
  FiniteModel model = finite_model(require(root, "model"));
  Assignment realization = finite_realization(model, root);
  Schedule schedule = Schedule::round_robin(model.expert_count());
  if (const YAML::Node s = root["schedule"]; s.IsDefined() && !s.IsNull()) {
    if (!s.IsSequence() || s.size() == 0) fail(s, "schedule must be a non-empty list of experts");
    std::vector<std::size_t> block;
    for (const auto& e : s) {
      const int idx = scalar<int>(e, "schedule entry");
      if (idx < 1 || static_cast<std::size_t>(idx) > model.expert_count()) {
        fail(e, "schedule entry " + std::to_string(idx) + " is not an expert number");
      }
      block.push_back(static_cast<std::size_t>(idx - 1));
    }
    schedule = Schedule(std::move(block));
  }
  return {std::move(model), std::move(realization), std::move(schedule)};
}

GaussianScenario Reader::gaussian(const YAML::Node& root) const {
  const YAML::Node model_node = require(root, "model");
  if (!model_node.IsMap()) fail(model_node, "model must be a mapping");
  std::optional<GaussianModel> model;
  if (const YAML::Node ds = model_node["dataset"]; ds.IsDefined()) {
    DatasetLayout layout{columns(require(ds, "x_columns"), "x_columns"),
                         columns(require(ds, "z_columns"), "z_columns"),
                         static_cast<std::size_t>(scalar<int>(require(ds, "y_column"), "y_column"))};
    CsvOptions csv;
    csv.header = scalar_or<bool>(ds, "header", true);
    csv.missing_sentinel = scalar_or<std::string>(ds, "missing", "NA");
    std::optional<std::size_t> expected;
    if (const YAML::Node n = ds["n_expected"]; n.IsDefined()) {
      expected = static_cast<std::size_t>(scalar<int>(n, "n_expected"));
    }
    try {
      model = load_dispersion(dataset_path(require(ds, "path")), layout, expected, csv).model;
    } catch (const DatasetShapeMismatch& e) {
      fail(ds, e.what());
    } catch (const NonNumericCell& e) {
      fail(ds, e.what());
    }
  } else {
    const auto k = static_cast<std::size_t>(scalar<int>(require(model_node, "k"), "k"));
    const auto h = static_cast<std::size_t>(scalar<int>(require(model_node, "h"), "h"));
    const YAML::Node disp = require(model_node, "dispersion");
    if (!disp.IsSequence()) fail(disp, "dispersion must be a list of rows");
    const auto n = static_cast<Eigen::Index>(disp.size());
    Eigen::MatrixXd sigma(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto row = doubles(disp[static_cast<std::size_t>(i)], "dispersion row");
      if (static_cast<Eigen::Index>(row.size()) != n) fail(disp, "dispersion must be square");
      for (Eigen::Index j = 0; j < n; ++j) sigma(i, j) = row[static_cast<std::size_t>(j)];
    }
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    if (const YAML::Node m = model_node["mean"]; m.IsDefined()) mean = vector(m, "mean");
    try {
      model.emplace(k, h, mean, sigma);
    } catch (const InvalidModel& e) {
      fail(model_node, e.what());
    }
  }
  const YAML::Node r = require(root, "realization");
  Eigen::VectorXd x = vector(require(r, "x"), "x");
  Eigen::VectorXd z = vector(require(r, "z"), "z");
  if (static_cast<std::size_t>(x.size()) != model->k() ||
      static_cast<std::size_t>(z.size()) != model->h()) {
    fail(r, "realization dimensions (" + std::to_string(x.size()) + ", " +
                std::to_string(z.size()) + ") do not match the model blocks (" +
                std::to_string(model->k()) + ", " + std::to_string(model->h()) + ")");
  }
  const int first = scalar_or<int>(root, "first", 1);
  if (first != 1 && first != 2) fail(root["first"], "first must be 1 or 2");
  const int max_rounds = scalar_or<int>(root, "max_rounds", 100);
  if (max_rounds < 1) fail(root["max_rounds"], "max_rounds must be positive");
  return {std::move(*model), std::move(x), std::move(z), static_cast<std::size_t>(max_rounds),
          first == 1 ? ExpertBlock::x : ExpertBlock::z};
}

MixtureScenario Reader::mixture(const YAML::Node& root) const {
  const YAML::Node model = root["model"];
  const double mu = model.IsDefined() && model.IsMap() ? scalar_or<double>(model, "mu", 0.0) : 0.0;
  const YAML::Node r = require(root, "realization");
  const double x1 = scalar<double>(require(r, "x1"), "x1");
  const double x2 = scalar<double>(require(r, "x2"), "x2");
  if (x1 == 0.0) fail(r["x1"], "x1 = 0 is a probability-zero realization");
  const int first = scalar_or<int>(root, "first", 1);
  if (first != 1 && first != 2) fail(root["first"], "first must be 1 or 2");
  return {x1, x2, mu, static_cast<std::size_t>(first)};
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text, std::string_view source_name,
                              const std::filesystem::path& base_dir) {
  const std::string source(source_name);
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source, e.mark.line + 1, e.msg);
  }
  const Reader reader(source, base_dir);
  if (!root.IsMap()) throw ConfigError(source, 1, "scenario must be a mapping");
  const auto engine = reader.scalar<std::string>(reader.require(root, "engine"), "engine");
  const std::string stem = std::filesystem::path(source).stem().string();

  if (engine == "finite") {
    return {reader.finite(root), reader.output(root, "trace", stem + ".trace.json"),
            reader.output(root, "report", stem + ".report.json")};
  }
  if (engine == "gaussian") {
    return {reader.gaussian(root), reader.output(root, "trace", stem + ".trace.csv"),
            reader.output(root, "report", stem + ".report.json")};
  }
  if (engine == "mixture") {
    return {reader.mixture(root), reader.output(root, "trace", stem + ".trace.json"),
            reader.output(root, "report", stem + ".report.json")};
  }
  reader.fail(root["engine"], "unknown engine '" + engine + "' (finite, gaussian, mixture)");
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "cannot open scenario file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.string(), path.parent_path());
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

namespace {

int run_config(const ScenarioConfig& config, std::ostream& out) {
  std::string trace_text;
  ConsensusReport report = std::visit(
      [&](const auto& s) -> ConsensusReport {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FiniteScenario>) {
          const FiniteTrace trace = run_market(s.model, s.realization, s.schedule);
          trace_text = finite_trace_to_json(s.model, s.schedule, trace).dump(2) + "\n";
          return finite_report(s.model, s.realization, s.schedule, trace);
        } else if constexpr (std::is_same_v<T, GaussianScenario>) {
          const LinearMarketTrace trace = run_linear_market(s.model, s.x, s.z, s.max_rounds, s.first);
          std::ostringstream csv;
          write_linear_trace_csv(csv, trace);
          trace_text = csv.str();
          return linear_report(s.model, s.x, s.z, trace, s.first);
        } else {
          const TsTrace trace = run_ts_market(s.x1, s.x2, s.mu, s.first_expert);
          trace_text = ts_trace_to_json(trace, s.x1, s.x2, s.mu).dump(2) + "\n";
          return ts_report(trace, s.first_expert);
        }
      },
      config.scenario);
  write_text(config.trace_path, trace_text);
  write_text(config.report_path, report_to_json(report).dump(2) + "\n");
  const Json limit = forecast_to_json(report.limit, report.target_values);
  out << "classification: " << to_string(report.classification) << "\n"
      << "rounds: " << report.rounds << "\n"
      << "limit: " << (limit.is_string() ? limit.get<std::string>() : limit.dump()) << "\n"
      << "trace: " << config.trace_path.string() << "\n"
      << "report: " << config.report_path.string() << "\n";
  return 0;
}

}  // namespace

int cmd_run(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  try {
    return run_config(load_scenario(config_path), out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DatasetUnavailable& e) {
    err << "error: " << e.what() << "\n"
        << "hint: point the scenario at a local copy of the dataset or set " << kDataDirEnv
        << "\n";
    return 4;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace pmarket
