#include "pmarket/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "pmarket/errors.hpp"
#include "pmarket/random_models.hpp"

namespace pmarket {

ConsensusReport finite_report(const FiniteModel& model, const Assignment& realization,
                              const Schedule& schedule) {
  return finite_report(model, realization, schedule, run_market(model, realization, schedule));
}

ConsensusReport finite_report(const FiniteModel& model, const Assignment& realization,
                              const Schedule& schedule, const FiniteTrace& trace) {
  ConsensusReport r{"finite",
                    CompareMode::exact,
                    trace.limit_forecast,
                    model.prior(),
                    pooled_forecast(model, realization),
                    trace.rounds_to_convergence,
                    Classification::limited,
                    schedule.str(),
                    model.target_values()};
  r.classification = classify(r.limit, r.prior, r.pooled, CompareMode::exact);
  return r;
}

ConsensusReport linear_report(const GaussianModel& model, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& z, const LinearMarketTrace& trace,
                              ExpertBlock first) {
  ConsensusReport r{"gaussian",
                    CompareMode::tolerance,
                    trace.limit(),
                    GaussianDist(model.target_mean(), model.target_variance()),
                    pooled_gaussian(model, x, z),
                    trace.rounds_to_convergence,
                    Classification::limited,
                    first == ExpertBlock::x ? "(E1,E2)" : "(E2,E1)",
                    {}};
  r.classification = classify(r.limit, r.prior, r.pooled, CompareMode::tolerance);
  return r;
}

ConsensusReport ts_report(const TsTrace& trace, std::size_t first_expert) {
  ConsensusReport r{"mixture",
                    CompareMode::tolerance,
                    trace.limit,
                    trace.prior,
                    trace.pooled,
                    trace.rounds_to_convergence,
                    Classification::limited,
                    first_expert == 1 ? "(E1,E2)" : "(E2,E1)",
                    {}};
  r.classification = classify(r.limit, r.prior, r.pooled, CompareMode::tolerance);
  return r;
}

namespace {

struct MartingaleNode {
  std::vector<std::size_t> atoms;
  Posterior last;
};

Rational mass_of(const FiniteModel& model, const std::vector<std::size_t>& atoms) {
  Rational m;
  for (auto a : atoms) m += model.table().atoms()[a].weight;
  return m;
}

}  // namespace

bool martingale_check_exact(const FiniteModel& model, const Schedule& schedule, std::size_t steps,
                            const ForecastRule& rule) {
  schedule.validate(model.expert_count());
  std::vector<MartingaleNode> frontier{{PublicEvent::initial(model).atoms(), model.prior()}};
  for (std::size_t step = 0; step < steps; ++step) {
    const std::size_t expert = schedule.expert_at(step);
    std::vector<MartingaleNode> next;
    for (const auto& node : frontier) {
      const PublicEvent state(node.atoms, {});
      const ForecastMap forecasts = rule(model, state, expert);
      // Cells of the public partition after this announcement.
      std::map<std::pair<std::optional<int>, Posterior>, std::vector<std::size_t>> cells;
      for (auto a : node.atoms) {
        const int h = model.private_value(expert, a);
        cells[{model.comment_for(expert, h), forecasts.at(h)}].push_back(a);
      }
      const Rational node_mass = mass_of(model, node.atoms);
      Posterior expected(node.last.size());
      for (const auto& [key, atoms] : cells) {
        const Rational p = mass_of(model, atoms) / node_mass;
        const Posterior& announced = key.second;
        if (announced.size() != expected.size()) return false;
        for (std::size_t i = 0; i < expected.size(); ++i) expected[i] += p * announced[i];
      }
      if (expected != node.last) return false;
      for (auto& [key, atoms] : cells) next.push_back({std::move(atoms), key.second});
    }
    frontier = std::move(next);
  }
  return true;
}

bool marginally_independent(const FiniteModel& model, std::size_t expert) {
  const Posterior prior = model.prior();
  const ForecastMap f = forecast_function(model, PublicEvent::initial(model), expert);
  return std::all_of(f.begin(), f.end(), [&](const auto& e) { return e.second == prior; });
}

VacuityResult vacuity_criterion(const FiniteModel& model) {
  return vacuity_criterion(model, Schedule::round_robin(model.expert_count()));
}

VacuityResult vacuity_criterion(const FiniteModel& model, const Schedule& schedule) {
  VacuityResult r{true, true};
  for (std::size_t e = 0; e < model.expert_count(); ++e) {
    r.predicted = r.predicted && marginally_independent(model, e);
  }
  const Posterior prior = model.prior();
  for (const auto& realization : distinct_private_realizations(model)) {
    if (run_market(model, realization, schedule).limit_forecast != prior) {
      r.observed = false;
      break;
    }
  }
  return r;
}

std::vector<ConsensusReport> order_experiment(const FiniteModel& model,
                                              const Assignment& realization,
                                              const std::vector<Schedule>& schedules) {
  if (schedules.size() < 2) throw InvalidModel("an order experiment needs at least two schedules");
  std::vector<ConsensusReport> out;
  for (const auto& s : schedules) out.push_back(finite_report(model, realization, s));
  return out;
}

std::vector<ConsensusReport> order_experiment(double x1, double x2, double mu,
                                              const std::vector<std::size_t>& first_experts) {
  if (first_experts.size() < 2) throw InvalidModel("an order experiment needs at least two orders");
  std::vector<ConsensusReport> out;
  for (auto first : first_experts) out.push_back(ts_report(run_ts_market(x1, x2, mu, first), first));
  return out;
}

MonteCarloMartingale martingale_check_monte_carlo(const GaussianModel& model, std::size_t draws,
                                                  std::uint64_t seed, std::size_t bins,
                                                  double z_limit) {
  if (bins == 0 || draws < 2 * bins) throw InvalidModel("too few draws for the requested bins");
  const auto p = static_cast<Eigen::Index>(model.predictors());
  const Eigen::MatrixXd lower = model.predictor_dispersion().llt().matrixL();
  const Eigen::VectorXd mu_w = model.mean().head(p);
  const std::size_t max_rounds = std::min(model.k(), model.h()) + 4;
  const std::size_t horizon = 2 * max_rounds + 1;  // prior plus every announcement

  // paths[d][i] is the forecast mean after i announcements of draw d.
  std::vector<std::vector<double>> paths(draws);
  Rng rng = stream_for(seed, 0);
  for (auto& path : paths) {
    const Eigen::VectorXd w = sample_normal(rng, mu_w, lower);
    const auto trace = run_linear_market(model, w.head(static_cast<Eigen::Index>(model.k())),
                                         w.tail(static_cast<Eigen::Index>(model.h())), max_rounds);
    path.push_back(model.target_mean());
    for (const auto& e : trace.entries) path.push_back(e.forecast.mean());
    path.resize(horizon, path.back());
  }

  MonteCarloMartingale out;
  out.draws = draws;
  std::vector<std::size_t> order(draws);
  for (std::size_t step = 0; step + 1 < horizon; ++step) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return paths[a][step] < paths[b][step]; });
    for (std::size_t bin = 0; bin < bins; ++bin) {
      const std::size_t lo = bin * draws / bins;
      const std::size_t hi = (bin + 1) * draws / bins;
      const auto n = static_cast<double>(hi - lo);
      double sum = 0.0;
      double sum_sq = 0.0;
      double scale = 0.0;
      for (std::size_t i = lo; i < hi; ++i) {
        const double d = paths[order[i]][step + 1] - paths[order[i]][step];
        sum += d;
        sum_sq += d * d;
        scale = std::max(scale, std::abs(paths[order[i]][step]));
      }
      const double mean = sum / n;
      const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
      const double se = std::sqrt(var / n);
      ++out.bins_checked;
      // Increments that vanish up to rounding carry no evidence either way.
      if (std::abs(mean) <= 1e-9 * (1.0 + scale)) continue;
      const double z = std::abs(mean) / se;
      out.worst_z = std::max(out.worst_z, z);
      if (z > z_limit) out.passed = false;
    }
  }
  return out;
}

}  // namespace pmarket
