#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pmarket/outcome_table.hpp"
#include "pmarket/rational.hpp"
#include "pmarket/schedule.hpp"

namespace pmarket {

/// Exact forecast of a finite target: one probability per value of the
/// target range, in range order. For a binary {0,1} target the event
/// probability P(A) is the second entry.
using Posterior = std::vector<Rational>;

/// P(target = 1) of a binary posterior. Throws InvalidModel otherwise.
Rational event_probability(const Posterior& posterior);

struct ExpertSpec {
  std::string private_variable;
  /// Deterministic public comment K(h) released before the forecast.
  std::optional<std::map<int, int>> comment;
};

/// Joint outcome table plus the target variable and the experts' private
/// variables. Everything an expert may observe is a column of the table.
class FiniteModel {
 public:
  /// Throws InvalidModel if a named variable is missing, there are no
  /// experts, or a comment map is not total over the private range.
  FiniteModel(OutcomeTable table, std::string target, std::vector<ExpertSpec> experts);

  const OutcomeTable& table() const { return table_; }
  const std::string& target_name() const { return target_; }
  std::size_t target_index() const { return target_index_; }
  const std::vector<int>& target_values() const;
  bool binary_target() const;

  std::size_t expert_count() const { return experts_.size(); }
  const std::vector<ExpertSpec>& experts() const { return experts_; }
  std::size_t private_index(std::size_t expert) const { return private_index_.at(expert); }
  const std::vector<int>& private_range(std::size_t expert) const;
  /// Comment released for private value h; nullopt if the expert has no comment function.
  std::optional<int> comment_for(std::size_t expert, int h) const;

  /// Position of the atom's target value within target_values().
  std::size_t target_position(std::size_t atom) const { return target_pos_[atom]; }
  int private_value(std::size_t expert, std::size_t atom) const {
    return table_.atoms()[atom].assignment[private_index_[expert]];
  }

  /// P(target | atoms), atoms given as indices into table().atoms().
  /// Throws ZeroProbabilityEvent for an empty or weightless subset.
  Posterior posterior(std::span<const std::size_t> atoms) const;
  Posterior prior() const;

 private:
  OutcomeTable table_;
  std::string target_;
  std::vector<ExpertSpec> experts_;
  std::size_t target_index_ = 0;
  std::vector<std::size_t> private_index_;
  std::vector<std::size_t> target_pos_;
};

struct FiniteAnnouncement {
  std::size_t expert;
  std::optional<int> comment;
  Posterior forecast;
};

/// Common-knowledge state: the atoms still compatible with everything
/// announced so far, and the announcements themselves.
class PublicEvent {
 public:
  /// The whole outcome space, empty log.
  static PublicEvent initial(const FiniteModel& model);

  PublicEvent() = default;
  PublicEvent(std::vector<std::size_t> atoms, std::vector<FiniteAnnouncement> log);

  /// Sorted atom indices into the model table.
  const std::vector<std::size_t>& atoms() const { return atoms_; }
  const std::vector<FiniteAnnouncement>& log() const { return log_; }
  std::size_t size() const { return atoms_.size(); }
  bool contains(std::size_t atom) const;

 private:
  std::vector<std::size_t> atoms_;
  std::vector<FiniteAnnouncement> log_;
};

using ForecastMap = std::map<int, Posterior>;

/// For each private value h of the expert that is consistent with the
/// public event, P(target | public, H = h).
ForecastMap forecast_function(const FiniteModel& model, const PublicEvent& pub, std::size_t expert);

struct AnnounceResult {
  Posterior forecast;
  std::optional<int> comment;
  PublicEvent next;
};

/// The expert speaks at the realized state: releases its comment, then
/// its exact forecast. The public event is refined to the atoms that would
/// have produced the same comment and the same forecast.
/// Throws RealizationOutsidePublicEvent if the realization was already
/// ruled out.
AnnounceResult announce(const FiniteModel& model, const PublicEvent& pub, std::size_t expert,
                        const Assignment& realization);

struct FiniteStep {
  std::size_t round;  // 1-based
  std::size_t expert;
  std::optional<int> comment;
  Posterior forecast;
  std::size_t event_size_before;
  std::size_t event_size_after;
};

struct FiniteTrace {
  std::vector<FiniteStep> steps;
  /// First round from which every announcement equals the limit.
  std::size_t rounds_to_convergence = 0;
  /// Rounds actually played, including the final round that changed nothing.
  std::size_t rounds_executed = 0;
  Posterior limit_forecast;
  PublicEvent final_public;
};

/// Plays the schedule round by round until one full round leaves the public
/// event unchanged. The realization must be an atom of the table
/// (ZeroProbabilityEvent otherwise).
FiniteTrace run_market(const FiniteModel& model, const Assignment& realization,
                       const Schedule& schedule);

/// Per expert: does P(target | final, H = h) equal P(target | final) for
/// every h consistent with the final event?
std::vector<bool> verify_fixed_point(const FiniteModel& model, const PublicEvent& final_public);

/// P(target | every expert's private value as realized).
Posterior pooled_forecast(const FiniteModel& model, const Assignment& realization);

/// Distinct tuples of the experts' private values over the table, each
/// with the first atom that carries it. Announcements depend on the
/// realization only through this tuple.
std::vector<Assignment> distinct_private_realizations(const FiniteModel& model);

/// Parity check: X1, X2 fair coins, A = [X1 == X2], E1 sees X1, E2 sees X2.
FiniteModel build_parity_model();

/// Overlapping Bernoulli trials under a uniform prior on theta:
/// Y_j ~ Bin(n_j, theta), A ~ Bin(1, theta), E1 sees X1 = Y0 + Y1,
/// E2 sees X2 = Y0 + Y2. Weights are exact Beta integrals.
FiniteModel build_overlapping_bernoulli(unsigned n0, unsigned n1, unsigned n2);

}  // namespace pmarket
