#include "pmarket/outcome_table.hpp"

#include <algorithm>
#include <set>

#include "pmarket/errors.hpp"

namespace pmarket {

namespace {

void validate_variables(const std::vector<Variable>& variables) {
  std::set<std::string> names;
  for (const auto& v : variables) {
    if (v.name.empty()) throw InvalidModel("variable with empty name");
    if (!names.insert(v.name).second) throw InvalidModel("duplicate variable '" + v.name + "'");
    if (v.values.empty()) throw InvalidModel("variable '" + v.name + "' has an empty range");
    if (!std::is_sorted(v.values.begin(), v.values.end()) ||
        std::adjacent_find(v.values.begin(), v.values.end()) != v.values.end()) {
      throw InvalidModel("range of '" + v.name + "' must be sorted and duplicate-free");
    }
  }
}

void validate_atoms(const std::vector<Variable>& variables, std::vector<Atom>& atoms) {
  std::erase_if(atoms, [](const Atom& a) { return a.weight.is_zero(); });
  std::set<Assignment> seen;
  for (const auto& atom : atoms) {
    if (atom.weight.sign() < 0) throw InvalidModel("negative atom weight " + atom.weight.str());
    if (atom.assignment.size() != variables.size()) {
      throw InvalidModel("atom assignment has the wrong number of values");
    }
    for (std::size_t i = 0; i < variables.size(); ++i) {
      const auto& range = variables[i].values;
      if (!std::binary_search(range.begin(), range.end(), atom.assignment[i])) {
        throw InvalidModel("value " + std::to_string(atom.assignment[i]) +
                           " outside the range of '" + variables[i].name + "'");
      }
    }
    if (!seen.insert(atom.assignment).second) throw InvalidModel("duplicate atom assignment");
  }
}

}  // namespace

OutcomeTable::OutcomeTable(std::vector<Variable> variables, std::vector<Atom> atoms)
    : variables_(std::move(variables)), atoms_(std::move(atoms)) {
  validate_variables(variables_);
  validate_atoms(variables_, atoms_);
  Rational total;
  for (const auto& a : atoms_) total += a.weight;
  if (total != Rational(1)) {
    throw InvalidModel("atom weights sum to " + total.str() + ", expected 1/1");
  }
}

OutcomeTable OutcomeTable::normalized(std::vector<Variable> variables, std::vector<Atom> atoms) {
  Rational total;
  for (const auto& a : atoms) {
    if (a.weight.sign() < 0) throw InvalidModel("negative atom weight " + a.weight.str());
    total += a.weight;
  }
  if (total.is_zero()) throw InvalidModel("table has zero total weight");
  for (auto& a : atoms) a.weight /= total;
  return OutcomeTable(std::move(variables), std::move(atoms));
}

std::size_t OutcomeTable::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  throw InvalidModel("unknown variable '" + std::string(name) + "'");
}

bool OutcomeTable::has_variable(std::string_view name) const {
  return std::any_of(variables_.begin(), variables_.end(),
                     [&](const Variable& v) { return v.name == name; });
}

std::size_t OutcomeTable::find(const Assignment& assignment) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].assignment == assignment) return i;
  }
  return atoms_.size();
}

OutcomeTable condition(const OutcomeTable& table, const Event& event) {
  std::vector<Atom> kept;
  Rational mass;
  for (const auto& atom : table.atoms()) {
    if (event(atom.assignment)) {
      kept.push_back(atom);
      mass += atom.weight;
    }
  }
  if (mass.is_zero()) throw ZeroProbabilityEvent("conditioning on an event of probability zero");
  for (auto& atom : kept) atom.weight /= mass;
  return OutcomeTable(table.variables(), std::move(kept));
}

Rational marginal_prob(const OutcomeTable& table, const Event& event) {
  Rational out;
  for (const auto& atom : table.atoms()) {
    if (event(atom.assignment)) out += atom.weight;
  }
  return out;
}

Event equals(const OutcomeTable& table, std::string_view variable, int value) {
  const std::size_t idx = table.index_of(variable);
  return [idx, value](const Assignment& a) { return a[idx] == value; };
}

}  // namespace pmarket
