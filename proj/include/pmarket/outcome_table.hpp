#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "pmarket/rational.hpp"

namespace pmarket {

/// A named variable with a finite, sorted, duplicate-free integer range.
struct Variable {
  std::string name;
  std::vector<int> values;

  friend bool operator==(const Variable&, const Variable&) = default;
};

/// One value per table variable, in table variable order.
using Assignment = std::vector<int>;

struct Atom {
  Assignment assignment;
  Rational weight;

  friend bool operator==(const Atom&, const Atom&) = default;
};

using Event = std::function<bool(const Assignment&)>;

/// Finite joint distribution with exact rational weights. Only
/// positive-weight atoms are stored; weights sum to exactly one and
/// assignments are unique.
class OutcomeTable {
 public:
  /// Validates the table; zero-weight atoms are dropped. Throws InvalidModel.
  OutcomeTable(std::vector<Variable> variables, std::vector<Atom> atoms);

  /// Builds a table from non-negative weights of any positive total by
  /// dividing through by the total.
  static OutcomeTable normalized(std::vector<Variable> variables, std::vector<Atom> atoms);

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  /// Throws InvalidModel for an unknown name.
  std::size_t index_of(std::string_view name) const;
  bool has_variable(std::string_view name) const;

  /// Position of the atom with this exact assignment, or size() if absent.
  std::size_t find(const Assignment& assignment) const;

  friend bool operator==(const OutcomeTable&, const OutcomeTable&) = default;

 private:
  std::vector<Variable> variables_;
  std::vector<Atom> atoms_;
};

/// Restriction of the table to the event, renormalized exactly.
/// Throws ZeroProbabilityEvent when the event has weight zero.
OutcomeTable condition(const OutcomeTable& table, const Event& event);

/// Exact probability of the event.
Rational marginal_prob(const OutcomeTable& table, const Event& event);

/// Event "variable == value" for a named variable of the table.
Event equals(const OutcomeTable& table, std::string_view variable, int value);

}  // namespace pmarket
