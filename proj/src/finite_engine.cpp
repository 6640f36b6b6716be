#include "pmarket/finite_engine.hpp"

#include <algorithm>
#include <set>

#include "pmarket/errors.hpp"

namespace pmarket {

Rational event_probability(const Posterior& posterior) {
  if (posterior.size() != 2) {
    throw InvalidModel("event probability needs a binary target");
  }
  return posterior[1];
}

FiniteModel::FiniteModel(OutcomeTable table, std::string target, std::vector<ExpertSpec> experts)
    : table_(std::move(table)), target_(std::move(target)), experts_(std::move(experts)) {
  if (experts_.empty()) throw InvalidModel("a market needs at least one expert");
  target_index_ = table_.index_of(target_);
  for (const auto& e : experts_) {
    const std::size_t idx = table_.index_of(e.private_variable);
    if (idx == target_index_) throw InvalidModel("an expert cannot observe the target directly");
    private_index_.push_back(idx);
    if (e.comment) {
      for (int h : table_.variables()[idx].values) {
        if (!e.comment->contains(h)) {
          throw InvalidModel("comment function of '" + e.private_variable +
                             "' is not defined at " + std::to_string(h));
        }
      }
    }
  }
  const auto& range = target_values();
  target_pos_.reserve(table_.size());
  for (const auto& atom : table_.atoms()) {
    const auto it = std::lower_bound(range.begin(), range.end(), atom.assignment[target_index_]);
    target_pos_.push_back(static_cast<std::size_t>(it - range.begin()));
  }
}

const std::vector<int>& FiniteModel::target_values() const {
  return table_.variables()[target_index_].values;
}

bool FiniteModel::binary_target() const { return target_values() == std::vector<int>{0, 1}; }

const std::vector<int>& FiniteModel::private_range(std::size_t expert) const {
  return table_.variables()[private_index_.at(expert)].values;
}

std::optional<int> FiniteModel::comment_for(std::size_t expert, int h) const {
  const auto& spec = experts_.at(expert);
  if (!spec.comment) return std::nullopt;
  return spec.comment->at(h);
}

Posterior FiniteModel::posterior(std::span<const std::size_t> atoms) const {
  Posterior out(target_values().size());
  Rational mass;
  for (auto a : atoms) {
    const Rational& w = table_.atoms()[a].weight;
    out[target_pos_[a]] += w;
    mass += w;
  }
  if (mass.is_zero()) throw ZeroProbabilityEvent("posterior of an empty public event");
  for (auto& p : out) p /= mass;
  return out;
}

Posterior FiniteModel::prior() const {
  std::vector<std::size_t> all(table_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return posterior(all);
}

PublicEvent PublicEvent::initial(const FiniteModel& model) {
  std::vector<std::size_t> all(model.table().size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return PublicEvent(std::move(all), {});
}

PublicEvent::PublicEvent(std::vector<std::size_t> atoms, std::vector<FiniteAnnouncement> log)
    : atoms_(std::move(atoms)), log_(std::move(log)) {
  std::sort(atoms_.begin(), atoms_.end());
  atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
}

bool PublicEvent::contains(std::size_t atom) const {
  return std::binary_search(atoms_.begin(), atoms_.end(), atom);
}

ForecastMap forecast_function(const FiniteModel& model, const PublicEvent& pub, std::size_t expert) {
  if (expert >= model.expert_count()) throw InvalidModel("no such expert");
  std::map<int, std::vector<std::size_t>> cells;
  for (auto a : pub.atoms()) cells[model.private_value(expert, a)].push_back(a);
  if (cells.empty()) throw ZeroProbabilityEvent("public event is empty");
  ForecastMap out;
  for (const auto& [h, atoms] : cells) out.emplace(h, model.posterior(atoms));
  return out;
}

namespace {

std::size_t locate_realization(const FiniteModel& model, const Assignment& realization) {
  const std::size_t atom = model.table().find(realization);
  if (atom == model.table().size()) {
    throw ZeroProbabilityEvent("realization is not a positive-probability atom of the table");
  }
  return atom;
}

}  // namespace

AnnounceResult announce(const FiniteModel& model, const PublicEvent& pub, std::size_t expert,
                        const Assignment& realization) {
  const std::size_t realized_atom = locate_realization(model, realization);
  if (!pub.contains(realized_atom)) {
    throw RealizationOutsidePublicEvent("realization was excluded by earlier announcements");
  }
  const ForecastMap forecasts = forecast_function(model, pub, expert);
  const int h = model.private_value(expert, realized_atom);
  const Posterior& value = forecasts.at(h);
  const std::optional<int> comment = model.comment_for(expert, h);

  std::vector<std::size_t> kept;
  for (auto a : pub.atoms()) {
    const int other = model.private_value(expert, a);
    if (model.comment_for(expert, other) != comment) continue;
    if (forecasts.at(other) != value) continue;
    kept.push_back(a);
  }
  auto log = pub.log();
  log.push_back({expert, comment, value});
  return {value, comment, PublicEvent(std::move(kept), std::move(log))};
}

FiniteTrace run_market(const FiniteModel& model, const Assignment& realization,
                       const Schedule& schedule) {
  schedule.validate(model.expert_count());
  locate_realization(model, realization);

  FiniteTrace trace;
  PublicEvent state = PublicEvent::initial(model);
  // Every round but the last strictly shrinks the event.
  const std::size_t max_rounds = model.table().size() + 1;
  bool stable = false;
  std::size_t round = 0;
  while (!stable) {
    if (++round > max_rounds) throw MaxRoundsExceeded("finite market failed to stabilise");
    const std::size_t size_at_start = state.size();
    for (std::size_t e : schedule.block()) {
      const std::size_t before = state.size();
      AnnounceResult r = announce(model, state, e, realization);
      trace.steps.push_back({round, e, r.comment, r.forecast, before, r.next.size()});
      state = std::move(r.next);
    }
    stable = state.size() == size_at_start;
  }
  trace.rounds_executed = round;
  trace.limit_forecast = trace.steps.back().forecast;
  trace.rounds_to_convergence = round;
  for (auto it = trace.steps.rbegin(); it != trace.steps.rend(); ++it) {
    if (it->forecast != trace.limit_forecast) {
      trace.rounds_to_convergence = it->round + 1;
      break;
    }
    trace.rounds_to_convergence = it->round;
  }
  trace.final_public = std::move(state);
  return trace;
}

std::vector<bool> verify_fixed_point(const FiniteModel& model, const PublicEvent& final_public) {
  const Posterior overall = model.posterior(final_public.atoms());
  std::vector<bool> out;
  for (std::size_t e = 0; e < model.expert_count(); ++e) {
    const ForecastMap f = forecast_function(model, final_public, e);
    out.push_back(std::all_of(f.begin(), f.end(),
                              [&](const auto& entry) { return entry.second == overall; }));
  }
  return out;
}

Posterior pooled_forecast(const FiniteModel& model, const Assignment& realization) {
  const std::size_t realized_atom = locate_realization(model, realization);
  std::vector<std::size_t> match;
  for (std::size_t a = 0; a < model.table().size(); ++a) {
    bool same = true;
    for (std::size_t e = 0; e < model.expert_count() && same; ++e) {
      same = model.private_value(e, a) == model.private_value(e, realized_atom);
    }
    if (same) match.push_back(a);
  }
  return model.posterior(match);
}

std::vector<Assignment> distinct_private_realizations(const FiniteModel& model) {
  std::set<std::vector<int>> seen;
  std::vector<Assignment> out;
  for (std::size_t a = 0; a < model.table().size(); ++a) {
    std::vector<int> key;
    for (std::size_t e = 0; e < model.expert_count(); ++e) key.push_back(model.private_value(e, a));
    if (seen.insert(key).second) out.push_back(model.table().atoms()[a].assignment);
  }
  return out;
}

}  // namespace pmarket
