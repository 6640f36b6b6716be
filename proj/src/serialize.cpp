#include "pmarket/serialize.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

namespace pmarket {

namespace {

Json normal_to_json(const GaussianDist& g) {
  return Json{{"kind", "normal"}, {"mean", g.mean()}, {"variance", g.variance()}, {"sd", g.sd()}};
}

Json mixture_to_json(const GaussianMixture& m) {
  const auto [mean, var] = mixture_mean_var(m);
  Json comps = Json::array();
  for (const auto& c : m.components()) {
    comps.push_back(
        Json{{"weight", c.weight}, {"mean", c.dist.mean()}, {"variance", c.dist.variance()}});
  }
  return Json{{"kind", "mixture"}, {"mean", mean}, {"variance", var}, {"components", comps}};
}

std::string fixed8(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(8) << v;
  return os.str();
}

}  // namespace

Json forecast_to_json(const Forecast& forecast, const std::vector<int>& target_values) {
  if (const auto* p = std::get_if<Posterior>(&forecast)) {
    if (p->size() == 2 && (target_values.empty() || target_values == std::vector<int>{0, 1})) {
      return (*p)[1].str();
    }
    Json out = Json::object();
    for (std::size_t i = 0; i < p->size(); ++i) {
      const int label = i < target_values.size() ? target_values[i] : static_cast<int>(i);
      out[std::to_string(label)] = (*p)[i].str();
    }
    return out;
  }
  if (const auto* g = std::get_if<GaussianDist>(&forecast)) return normal_to_json(*g);
  return mixture_to_json(std::get<GaussianMixture>(forecast));
}

Json report_to_json(const ConsensusReport& report) {
  Json out{{"engine", report.engine},
           {"mode", std::string(to_string(report.mode))},
           {"classification", std::string(to_string(report.classification))},
           {"rounds", report.rounds},
           {"schedule", report.schedule},
           {"limit", forecast_to_json(report.limit, report.target_values)},
           {"prior", forecast_to_json(report.prior, report.target_values)},
           {"pooled", forecast_to_json(report.pooled, report.target_values)}};
  if (!report.target_values.empty()) out["target_values"] = report.target_values;
  return out;
}

Json finite_trace_to_json(const FiniteModel& model, const Schedule& schedule,
                          const FiniteTrace& trace) {
  Json steps = Json::array();
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    steps.push_back(Json{{"step", i + 1},
                         {"round", s.round},
                         {"expert", s.expert + 1},
                         {"comment", s.comment ? Json(*s.comment) : Json(nullptr)},
                         {"forecast", forecast_to_json(s.forecast, model.target_values())},
                         {"event_size_before", s.event_size_before},
                         {"event_size_after", s.event_size_after}});
  }
  return Json{{"engine", "finite"},
              {"target", model.target_name()},
              {"schedule", schedule.str()},
              {"rounds_to_convergence", trace.rounds_to_convergence},
              {"rounds_executed", trace.rounds_executed},
              {"limit", forecast_to_json(trace.limit_forecast, model.target_values())},
              {"steps", steps}};
}

Json ts_trace_to_json(const TsTrace& trace, double x1, double x2, double mu) {
  Json anns = Json::array();
  for (const auto& a : trace.announcements) {
    Json entry{{"round", a.round}, {"expert", a.expert}, {"basis", a.basis}, {"exact", a.exact}};
    const Json dist = mixture_to_json(a.distribution);
    for (const auto& [key, value] : dist.items()) entry[key] = value;
    anns.push_back(entry);
  }
  return Json{{"engine", "mixture"},
              {"x1", x1},
              {"x2", x2},
              {"mu", mu},
              {"converged", trace.converged},
              {"rounds_to_convergence", trace.rounds_to_convergence},
              {"rounds_executed", trace.rounds_executed},
              {"announcements", anns}};
}

void write_linear_trace_csv(std::ostream& out, const LinearMarketTrace& trace) {
  out << "round,expert,mean,sd,new_statistic_added\n";
  for (const auto& e : trace.entries) {
    out << e.round << ',' << (e.expert == ExpertBlock::x ? 1 : 2) << ',' << fixed8(e.forecast.mean())
        << ',' << fixed8(e.forecast.sd()) << ',' << (e.new_statistic_added ? "true" : "false")
        << '\n';
  }
}

Json finite_model_to_json(const FiniteModel& model) {
  Json vars = Json::array();
  for (const auto& v : model.table().variables()) {
    vars.push_back(Json{{"name", v.name}, {"values", v.values}});
  }
  Json experts = Json::array();
  for (const auto& e : model.experts()) {
    Json entry{{"private", e.private_variable}};
    if (e.comment) {
      Json c = Json::object();
      for (const auto& [h, k] : *e.comment) c[std::to_string(h)] = k;
      entry["comment"] = c;
    }
    experts.push_back(entry);
  }
  Json atoms = Json::array();
  for (const auto& a : model.table().atoms()) {
    atoms.push_back(Json{{"assignment", a.assignment}, {"weight", a.weight.str()}});
  }
  return Json{{"variables", vars},
              {"target", model.target_name()},
              {"experts", experts},
              {"atoms", atoms}};
}

}  // namespace pmarket
