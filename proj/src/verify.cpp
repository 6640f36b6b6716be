#include "pmarket/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "pmarket/finite_engine.hpp"
#include "pmarket/forecast.hpp"
#include "pmarket/gaussian_engine.hpp"
#include "pmarket/mixture_engine.hpp"
#include "pmarket/protocol.hpp"
#include "pmarket/random_models.hpp"
#include "pmarket/serialize.hpp"

namespace pmarket {

std::optional<Suite> parse_suite(std::string_view name) {
  if (name == "all") return Suite::all;
  if (name == "martingale") return Suite::martingale;
  if (name == "vacuity") return Suite::vacuity;
  if (name == "bounds") return Suite::bounds;
  if (name == "mixture") return Suite::mixture;
  return std::nullopt;
}

std::string_view to_string(Suite suite) {
  switch (suite) {
    case Suite::all: return "all";
    case Suite::martingale: return "martingale";
    case Suite::vacuity: return "vacuity";
    case Suite::bounds: return "bounds";
    case Suite::mixture: return "mixture";
  }
  return "?";
}

namespace {

// A check returns nullopt on success, or the failing case as JSON.
using Check = std::function<std::optional<Json>(Rng&)>;

struct Property {
  std::string name;
  std::uint64_t stream;
  std::size_t cases;
  Check check;
};

bool report(const Property& p, std::uint64_t seed, std::ostream& out) {
  std::size_t passed = 0;
  std::optional<std::pair<std::size_t, Json>> first_failure;
  for (std::size_t i = 0; i < p.cases; ++i) {
    Rng rng = stream_for(seed, (p.stream << 32) | i);
    std::optional<Json> failure;
    try {
      failure = p.check(rng);
    } catch (const std::exception& e) {
      failure = Json{{"exception", e.what()}};
    }
    if (!failure) {
      ++passed;
    } else if (!first_failure) {
      first_failure.emplace(i, std::move(*failure));
    }
  }
  const bool ok = passed == p.cases;
  out << (ok ? "PASS " : "FAIL ") << p.name << " [" << passed << "/" << p.cases << "]\n";
  if (first_failure) {
    out << "  case " << first_failure->first << ": " << first_failure->second.dump() << "\n";
  }
  return ok;
}

Json failing(const FiniteModel& model, const std::string& what) {
  return Json{{"failure", what}, {"model", finite_model_to_json(model)}};
}

Json failing(const GaussianModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& z,
             const std::string& what) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); };
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < model.dispersion().rows(); ++i) {
    rows.push_back(vec(model.dispersion().row(i).transpose()));
  }
  return Json{{"failure", what},
              {"k", model.k()},
              {"h", model.h()},
              {"mean", vec(model.mean())},
              {"dispersion", rows},
              {"x", vec(x)},
              {"z", vec(z)}};
}

std::size_t uniform_size(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Draws a model and a realization of its predictors.
struct GaussianCase {
  GaussianModel model;
  Eigen::VectorXd x;
  Eigen::VectorXd z;
};

GaussianCase random_gaussian_case(Rng& rng, std::size_t max_block) {
  const std::size_t k = uniform_size(rng, 1, max_block);
  const std::size_t h = uniform_size(rng, 1, max_block);
  GaussianModel model = random_gaussian_model(rng, k, h);
  const Eigen::MatrixXd lower = model.dispersion().llt().matrixL();
  const Eigen::VectorXd w = sample_normal(rng, model.mean(), lower);
  return {std::move(model), w.head(static_cast<Eigen::Index>(k)),
          w.segment(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(h))};
}

std::optional<Json> check_finite_martingale(Rng& rng) {
  const FiniteModel model = random_finite_model(rng);
  if (!martingale_check_exact(model, Schedule::round_robin(2), 6)) {
    return failing(model, "E(next forecast | public) != current forecast");
  }
  return std::nullopt;
}

std::optional<Json> check_gaussian_martingale(Rng& rng) {
  const GaussianModel model = random_gaussian_model(rng, uniform_size(rng, 1, 3),
                                                    uniform_size(rng, 1, 3));
  const auto result = martingale_check_monte_carlo(model, 2000, rng());
  if (!result.passed) {
    return failing(model, Eigen::VectorXd(), Eigen::VectorXd(),
                   "mean increment z-score " + std::to_string(result.worst_z));
  }
  return std::nullopt;
}

std::optional<Json> check_vacuity(const FiniteModel& model) {
  const VacuityResult r = vacuity_criterion(model);
  if (r.predicted != r.observed) {
    return failing(model, std::string("predicted ") + (r.predicted ? "vacuous" : "not vacuous") +
                              ", observed " + (r.observed ? "vacuous" : "not vacuous"));
  }
  return std::nullopt;
}

std::optional<Json> check_finite_bounds(Rng& rng) {
  const FiniteModel model = random_finite_model(rng);
  const std::size_t bound = model.private_range(0).size() + model.private_range(1).size();
  const Schedule schedule = Schedule::round_robin(2);
  for (const Assignment& realization : distinct_private_realizations(model)) {
    const FiniteTrace trace = run_market(model, realization, schedule);
    if (trace.rounds_to_convergence > bound) {
      return failing(model, "rounds " + std::to_string(trace.rounds_to_convergence) +
                                " exceed K1+K2 = " + std::to_string(bound));
    }
    for (bool ok : verify_fixed_point(model, trace.final_public)) {
      if (!ok) return failing(model, "limit is not a fixed point");
    }
  }
  return std::nullopt;
}

std::optional<Json> check_gaussian_consensus(Rng& rng) {
  const GaussianCase c = random_gaussian_case(rng, 6);
  const LinearMarketTrace trace = run_linear_market(c.model, c.x, c.z, 50);
  const GaussianDist pooled = pooled_gaussian(c.model, c.x, c.z);
  if (!trace.converged || !trace.within_round_bound) {
    return failing(c.model, c.x, c.z,
                   "rounds " + std::to_string(trace.rounds_to_convergence) +
                       " exceed min(k,h)+2");
  }
  const std::size_t n = trace.entries.size();
  for (std::size_t i = n - 2; i < n; ++i) {
    const GaussianDist& f = trace.entries[i].forecast;
    if (std::abs(f.mean() - pooled.mean()) > 1e-8 || std::abs(f.sd() - pooled.sd()) > 1e-8) {
      return failing(c.model, c.x, c.z, "final forecast differs from pooled");
    }
  }
  for (bool ok : verify_linear_fixed_point(c.model, c.x, c.z, trace.final_span)) {
    if (!ok) return failing(c.model, c.x, c.z, "limit is not a fixed point");
  }
  return std::nullopt;
}

constexpr double kMixtureMus[] = {-1.0, 0.0, 0.5, 2.0};

std::optional<Json> check_mixture(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.5);
  const double mu = kMixtureMus[uniform_size(rng, 0, 3)];
  double x1 = normal(rng);
  while (std::abs(x1) < 1e-3) x1 = normal(rng);
  double x2 = normal(rng);
  while (std::abs(x2) < 1e-3) x2 = normal(rng);
  const Json where{{"x1", x1}, {"x2", x2}, {"mu", mu}};
  auto fail = [&](const std::string& what) {
    Json j = where;
    j["failure"] = what;
    return j;
  };

  const TsTrace trace = run_ts_market(x1, x2, mu);
  if (!trace.converged || trace.rounds_to_convergence != 2) {
    return fail("converged at round " + std::to_string(trace.rounds_to_convergence));
  }
  if (ts_report(trace).classification != Classification::limited) {
    return fail("classification is not limited");
  }
  const SufficientStat s = SufficientStat::from(x1, x2);
  const SignWeights w = sign_weights(std::abs(s.s1), s.s2, mu);
  if (mu == 0.0 && (w.plus != 0.5 || w.minus != 0.5)) return fail("sign weights not (1/2,1/2)");
  if (!verify_sign_independence(mu, std::abs(s.s1), s.s2)) return fail("sign independence");
  if (!verify_conditional_invariance(x1, x2, mu)) return fail("conditional invariance");
  return std::nullopt;
}

std::vector<Property> properties(Suite suite, std::size_t count) {
  const std::size_t few = std::max<std::size_t>(1, count / 20);
  const std::size_t some = std::max<std::size_t>(1, count / 10);
  std::vector<Property> out;
  const bool all = suite == Suite::all;
  if (all || suite == Suite::martingale) {
    out.push_back({"martingale.finite_exact", 1, count, check_finite_martingale});
    out.push_back({"martingale.gaussian_monte_carlo", 2, few, check_gaussian_martingale});
  }
  if (all || suite == Suite::vacuity) {
    out.push_back({"vacuity.random_models", 3, count,
                   [](Rng& rng) { return check_vacuity(random_finite_model(rng)); }});
    out.push_back({"vacuity.independent_models", 4, some,
                   [](Rng& rng) { return check_vacuity(random_independent_model(rng)); }});
  }
  if (all || suite == Suite::bounds) {
    out.push_back({"bounds.finite_rounds", 5, count, check_finite_bounds});
    out.push_back({"bounds.gaussian_consensus", 6, some, check_gaussian_consensus});
  }
  if (all || suite == Suite::mixture) {
    out.push_back({"mixture.limited_consensus", 7, count, check_mixture});
  }
  return out;
}

}  // namespace

int cmd_verify(Suite suite, std::uint64_t seed, std::size_t count, std::ostream& out) {
  out << "verify " << to_string(suite) << " seed=" << seed << " count=" << count << "\n";
  bool ok = true;
  for (const Property& p : properties(suite, count)) ok = report(p, seed, out) && ok;
  out << (ok ? "all properties passed" : "some properties failed") << "\n";
  return ok ? 0 : 1;
}

}  // namespace pmarket
