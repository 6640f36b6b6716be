#include "pmarket/finite_engine.hpp"

namespace pmarket {

FiniteModel build_parity_model() {
  std::vector<Variable> vars{{"X1", {0, 1}}, {"X2", {0, 1}}, {"A", {0, 1}}};
  std::vector<Atom> atoms;
  for (int x1 = 0; x1 <= 1; ++x1) {
    for (int x2 = 0; x2 <= 1; ++x2) {
      atoms.push_back({{x1, x2, x1 == x2 ? 1 : 0}, Rational(1, 4)});
    }
  }
  return FiniteModel(OutcomeTable(std::move(vars), std::move(atoms)), "A",
                     {{"X1", std::nullopt}, {"X2", std::nullopt}});
}

FiniteModel build_overlapping_bernoulli(unsigned n0, unsigned n1, unsigned n2) {
  auto range = [](unsigned n) {
    std::vector<int> v(n + 1);
    for (unsigned i = 0; i <= n; ++i) v[i] = static_cast<int>(i);
    return v;
  };
  std::vector<Variable> vars{{"Y0", range(n0)}, {"Y1", range(n1)}, {"Y2", range(n2)},
                             {"A", {0, 1}},     {"X1", range(n0 + n1)}, {"X2", range(n0 + n2)}};

  // With theta uniform, the probability of a particular outcome sequence
  // with s successes in m trials is s! (m - s)! / (m + 1)!.
  const unsigned trials = n0 + n1 + n2 + 1;
  const mpz_class denom = factorial(trials + 1);
  std::vector<Atom> atoms;
  for (unsigned y0 = 0; y0 <= n0; ++y0) {
    for (unsigned y1 = 0; y1 <= n1; ++y1) {
      for (unsigned y2 = 0; y2 <= n2; ++y2) {
        for (unsigned a = 0; a <= 1; ++a) {
          const unsigned s = y0 + y1 + y2 + a;
          const mpz_class count = binomial(n0, y0) * binomial(n1, y1) * binomial(n2, y2);
          const mpz_class num = count * factorial(s) * factorial(trials - s);
          atoms.push_back({{static_cast<int>(y0), static_cast<int>(y1), static_cast<int>(y2),
                            static_cast<int>(a), static_cast<int>(y0 + y1),
                            static_cast<int>(y0 + y2)},
                           Rational(num, denom)});
        }
      }
    }
  }
  return FiniteModel(OutcomeTable(std::move(vars), std::move(atoms)), "A",
                     {{"X1", std::nullopt}, {"X2", std::nullopt}});
}

}  // namespace pmarket
