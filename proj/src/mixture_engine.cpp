#include "pmarket/mixture_engine.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pmarket/errors.hpp"

namespace pmarket {

SufficientStat SufficientStat::from(double x1, double x2) { return {x1 * x2, std::abs(x1)}; }

GaussianDist component_posterior(double s1, double s2, double mu) {
  if (s2 < 0.0) throw InvalidModel("s2 = |x1| must be non-negative");
  const double precision = 1.0 + s2 * s2;
  return GaussianDist((mu + s1) / precision, 1.0 / precision);
}

double joint_density(double x1, double x2, double mu) {
  const double q = 1.0 + x1 * x1;
  const double r = x2 - mu * x1;
  return std::exp(-0.5 * (x1 * x1 + r * r / q)) / (2.0 * std::numbers::pi * std::sqrt(q));
}

SignWeights sign_weights(double m1, double m2, double mu) {
  if (!(m2 > 0.0)) throw DegenerateStatistic("sign weights need S2 = |x1| > 0");
  if (m1 < 0.0) throw InvalidModel("m1 = |S1| must be non-negative");
  if (m1 == 0.0) return {0.5, 0.5};
  const double b = m1 / m2;
  const double plus = joint_density(m2, b, mu) + joint_density(-m2, -b, mu);
  const double minus = joint_density(m2, -b, mu) + joint_density(-m2, b, mu);
  const double total = plus + minus;
  return {plus / total, minus / total};
}

GaussianMixture mixture_posterior(double m1, double m2, double mu) {
  const SignWeights w = sign_weights(m1, m2, mu);
  return GaussianMixture({{w.plus, component_posterior(m1, m2, mu)},
                          {w.minus, component_posterior(-m1, m2, mu)}});
}

GaussianDist posterior_given_abs_x2(double x2, double mu) {
  using boost::math::quadrature::gauss_kronrod;
  // X2 | theta ~ N(0, 1 + theta^2), so the likelihood depends on |x2| only.
  auto unnormalized = [x2, mu](double theta) {
    const double v = 1.0 + theta * theta;
    return std::exp(-0.5 * (theta - mu) * (theta - mu) - 0.5 * x2 * x2 / v) / std::sqrt(v);
  };
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr double tol = 1e-9;
  const double z = gauss_kronrod<double, 61>::integrate(unnormalized, -inf, inf, 15, tol);
  const double m1 = gauss_kronrod<double, 61>::integrate(
                        [&](double t) { return t * unnormalized(t); }, -inf, inf, 15, tol) /
                    z;
  const double m2 = gauss_kronrod<double, 61>::integrate(
                        [&](double t) { return (t - m1) * (t - m1) * unnormalized(t); }, -inf, inf,
                        15, tol) /
                    z;
  return GaussianDist(m1, m2);
}

bool verify_sign_independence(double mu, double m1, double m2) {
  if (!(m2 > 0.0)) throw DegenerateStatistic("sign check needs |x1| > 0");
  const double a = m2;
  const double b = m1 / m2;
  const double pp = joint_density(a, b, mu);
  const double pm = joint_density(a, -b, mu);
  const double mp = joint_density(-a, b, mu);
  const double mm = joint_density(-a, -b, mu);
  // Given sign(X1 X2) = +1 the patterns are (+,+), (-,-); given -1, (+,-), (-,+).
  const double x1_given_pos = pp / (pp + mm);
  const double x1_given_neg = pm / (pm + mp);
  const double x2_given_pos = pp / (pp + mm);
  const double x2_given_neg = mp / (pm + mp);
  constexpr double tol = 1e-12;
  for (double p : {x1_given_pos, x1_given_neg, x2_given_pos, x2_given_neg}) {
    if (std::abs(p - 0.5) > tol) return false;
  }
  return true;
}

GaussianMixture sign_pattern_posterior(double x1, double x2, double mu, bool know_sign_x1,
                                       bool know_sign_x2) {
  const double a = std::abs(x1);
  const double b = std::abs(x2);
  std::vector<double> signs1 = know_sign_x1 ? std::vector<double>{x1 < 0 ? -1.0 : 1.0}
                                            : std::vector<double>{1.0, -1.0};
  std::vector<double> signs2 = know_sign_x2 ? std::vector<double>{x2 < 0 ? -1.0 : 1.0}
                                            : std::vector<double>{1.0, -1.0};
  if (b == 0.0) signs2 = {1.0};
  std::vector<double> weights;
  std::vector<GaussianDist> posteriors;
  double total = 0.0;
  for (double e1 : signs1) {
    for (double e2 : signs2) {
      const double w = joint_density(e1 * a, e2 * b, mu);
      const SufficientStat s = SufficientStat::from(e1 * a, e2 * b);
      weights.push_back(w);
      posteriors.push_back(component_posterior(s.s1, s.s2, mu));
      total += w;
    }
  }
  std::vector<MixtureComponent> comps;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    comps.push_back({weights[i] / total, posteriors[i]});
  }
  return GaussianMixture(std::move(comps));
}

bool verify_conditional_invariance(double x1, double x2, double mu, double tolerance) {
  if (x1 == 0.0) throw DegenerateStatistic("invariance check needs x1 != 0");
  const GaussianMixture given_x1 = sign_pattern_posterior(x1, x2, mu, true, false);
  const GaussianMixture given_x2 = sign_pattern_posterior(x1, x2, mu, false, true);
  const GaussianMixture given_abs = sign_pattern_posterior(x1, x2, mu, false, false);
  const double spread = 8.0 / std::sqrt(1.0 + x1 * x1);
  const double centre = mu / (1.0 + x1 * x1);
  const double reach = std::abs(x1 * x2) / (1.0 + x1 * x1) + spread;
  constexpr int kPoints = 401;
  for (int i = 0; i < kPoints; ++i) {
    const double theta = centre - reach + 2.0 * reach * i / (kPoints - 1);
    const double ref = given_abs.pdf(theta);
    if (std::abs(given_x1.pdf(theta) - ref) > tolerance ||
        std::abs(given_x2.pdf(theta) - ref) > tolerance) {
      return false;
    }
  }
  return true;
}

namespace {

TsKnowledge merge(TsKnowledge a, const TsKnowledge& b) {
  a.abs_x1 |= b.abs_x1;
  a.sign_x1 |= b.sign_x1;
  a.abs_x2 |= b.abs_x2;
  a.sign_x2 |= b.sign_x2;
  return a;
}

std::string describe(const TsKnowledge& k) {
  std::string out;
  auto add = [&out](const char* s) {
    if (!out.empty()) out += ",";
    out += s;
  };
  if (k.abs_x1) add(k.sign_x1 ? "x1" : "|x1|");
  if (k.abs_x2) add(k.sign_x2 ? "x2" : "|x2|");
  return out.empty() ? "nothing" : out;
}

struct Opinion {
  GaussianMixture distribution;
  bool exact;
  TsKnowledge reveals;
};

// Posterior of theta given what the speaker knows, and what announcing it
// makes public. X1 alone carries no information about theta. Given both
// magnitudes, one known sign says nothing about sign(S1), so the posterior
// is the sign mixture.
Opinion opinion(const TsKnowledge& info, double x1, double x2, double mu) {
  const double a = std::abs(x1);
  const double b = std::abs(x2);
  if (info.abs_x1 && info.abs_x2) {
    TsKnowledge reveals{.abs_x1 = true, .abs_x2 = true};
    if (info.sign_x1 && info.sign_x2) {
      const SufficientStat s = SufficientStat::from(x1, x2);
      return {GaussianMixture(component_posterior(s.s1, s.s2, mu)), true, reveals};
    }
    return {mixture_posterior(a * b, a, mu), true, reveals};
  }
  if (info.abs_x2) {
    return {GaussianMixture(posterior_given_abs_x2(x2, mu)), false, {.abs_x2 = true}};
  }
  return {GaussianMixture(GaussianDist(mu, 1.0)), true, {}};
}

}  // namespace

TsTrace run_ts_market(double x1, double x2, double mu, std::size_t first_expert) {
  if (x1 == 0.0) throw DegenerateStatistic("x1 = 0 has probability zero and is rejected");
  if (!std::isfinite(x1) || !std::isfinite(x2) || !std::isfinite(mu)) {
    throw InvalidModel("non-finite input to the limited-consensus market");
  }
  if (first_expert != 1 && first_expert != 2) throw InvalidModel("first expert must be 1 or 2");

  const TsKnowledge private_info[2] = {{.abs_x1 = true, .sign_x1 = true},
                                       {.abs_x2 = true, .sign_x2 = true}};
  const std::size_t order[2] = {first_expert, 3 - first_expert};
  const SufficientStat s = SufficientStat::from(x1, x2);

  TsKnowledge pub;
  std::vector<TsAnnouncement> log;
  std::size_t round = 0;
  constexpr std::size_t kMaxRounds = 8;
  bool stable = false;
  while (!stable && round < kMaxRounds) {
    ++round;
    const TsKnowledge at_start = pub;
    for (std::size_t expert : order) {
      const TsKnowledge info = merge(pub, private_info[expert - 1]);
      Opinion o = opinion(info, x1, x2, mu);
      log.push_back({round, expert, std::move(o.distribution), o.exact, describe(info)});
      pub = merge(pub, o.reveals);
    }
    stable = pub == at_start;
  }
  if (!stable) throw MaxRoundsExceeded("limited-consensus market did not stabilise");

  const GaussianMixture limit = log.back().distribution;
  std::size_t converged_at = round;
  for (auto it = log.rbegin(); it != log.rend(); ++it) {
    if (!(it->distribution == limit)) {
      converged_at = it->round + 1;
      break;
    }
    converged_at = it->round;
  }
  return TsTrace{std::move(log),
                 true,
                 converged_at,
                 round,
                 limit,
                 GaussianDist(mu, 1.0),
                 component_posterior(s.s1, s.s2, mu),
                 pub};
}

}  // namespace pmarket
