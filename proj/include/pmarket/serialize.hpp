#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "pmarket/finite_engine.hpp"
#include "pmarket/gaussian_engine.hpp"
#include "pmarket/mixture_engine.hpp"
#include "pmarket/protocol.hpp"

namespace pmarket {

using Json = nlohmann::ordered_json;

/// Finite forecasts become "num/den" strings: a single string for a binary
/// target, otherwise an object keyed by target value. Continuous forecasts
/// carry decimal mean/variance (and components for mixtures).
Json forecast_to_json(const Forecast& forecast, const std::vector<int>& target_values = {});

/// {"engine", "mode", "classification", "rounds", "schedule", "limit",
///  "prior", "pooled"[, "target_values"]}
Json report_to_json(const ConsensusReport& report);

Json finite_trace_to_json(const FiniteModel& model, const Schedule& schedule,
                          const FiniteTrace& trace);
Json ts_trace_to_json(const TsTrace& trace, double x1, double x2, double mu);

/// Columns: round,expert,mean,sd,new_statistic_added. Expert is 1 (X block)
/// or 2 (Z block); numbers in fixed notation with 8 decimals.
void write_linear_trace_csv(std::ostream& out, const LinearMarketTrace& trace);

/// Inline scenario form of a finite model: variables, target, experts, atoms.
Json finite_model_to_json(const FiniteModel& model);

}  // namespace pmarket
