#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pmarket/finite_engine.hpp"
#include "pmarket/forecast.hpp"
#include "pmarket/gaussian_engine.hpp"
#include "pmarket/mixture_engine.hpp"
#include "pmarket/schedule.hpp"

namespace pmarket {

struct ConsensusReport {
  std::string engine;  // "finite", "gaussian" or "mixture"
  CompareMode mode;
  Forecast limit;
  Forecast prior;
  Forecast pooled;
  std::size_t rounds;
  Classification classification;
  std::string schedule;
  /// Target range for finite forecasts; empty otherwise.
  std::vector<int> target_values;
};

/// Runs the finite market and classifies its limit exactly.
ConsensusReport finite_report(const FiniteModel& model, const Assignment& realization,
                              const Schedule& schedule);
ConsensusReport finite_report(const FiniteModel& model, const Assignment& realization,
                              const Schedule& schedule, const FiniteTrace& trace);

/// Classifies a finished linear market within 1e-8.
ConsensusReport linear_report(const GaussianModel& model, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& z, const LinearMarketTrace& trace,
                              ExpertBlock first = ExpertBlock::x);

ConsensusReport ts_report(const TsTrace& trace, std::size_t first_expert = 1);

/// The rule an expert uses to map its private value to a forecast.
using ForecastRule =
    std::function<ForecastMap(const FiniteModel&, const PublicEvent&, std::size_t expert)>;

/// Exact check that E(next forecast | public state) equals the last
/// announced forecast (the prior before the first step), at every
/// reachable public state for the first `steps` announcements of the
/// schedule. `rule` defaults to the honest forecast_function.
bool martingale_check_exact(const FiniteModel& model, const Schedule& schedule, std::size_t steps,
                            const ForecastRule& rule = forecast_function);

/// Is the expert's private variable independent of the target? Exact.
bool marginally_independent(const FiniteModel& model, std::size_t expert);

struct VacuityResult {
  /// Every expert's private variable is marginally independent of the target.
  bool predicted;
  /// The market limit equals the prior at every positive-probability realization.
  bool observed;
};

/// Both sides of the vacuity criterion. Comments are played as configured;
/// the equivalence is only claimed for models without comments.
VacuityResult vacuity_criterion(const FiniteModel& model);
VacuityResult vacuity_criterion(const FiniteModel& model, const Schedule& schedule);

/// One report per schedule, all from the same realization.
std::vector<ConsensusReport> order_experiment(const FiniteModel& model,
                                              const Assignment& realization,
                                              const std::vector<Schedule>& schedules);

/// The limited-consensus market under each opening expert (1 or 2).
std::vector<ConsensusReport> order_experiment(double x1, double x2, double mu,
                                              const std::vector<std::size_t>& first_experts);

struct MonteCarloMartingale {
  bool passed = true;
  std::size_t draws = 0;
  std::size_t bins_checked = 0;
  /// Largest |mean increment| / standard error over all step/bin pairs.
  double worst_z = 0.0;
};

/// Draws (X, Z) from the model, plays the linear market, and tests that the
/// forecast-mean increments have mean zero within `z_limit` standard errors
/// inside each quantile bin of the current forecast, step by step.
MonteCarloMartingale martingale_check_monte_carlo(const GaussianModel& model, std::size_t draws,
                                                  std::uint64_t seed, std::size_t bins = 5,
                                                  double z_limit = 4.0);

}  // namespace pmarket
