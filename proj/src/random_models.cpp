#include "pmarket/random_models.hpp"

#include <algorithm>
#include <numeric>

namespace pmarket {

Rng stream_for(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x70u};
  return Rng(seq);
}

namespace {

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::vector<int> iota_range(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<Variable> two_expert_variables(int k1, int k2, int t) {
  return {{"H1", iota_range(k1)}, {"H2", iota_range(k2)}, {"Y", iota_range(t)}};
}

FiniteModel two_expert_model(std::vector<Variable> vars, std::vector<Atom> atoms) {
  return FiniteModel(OutcomeTable::normalized(std::move(vars), std::move(atoms)), "Y",
                     {{"H1", std::nullopt}, {"H2", std::nullopt}});
}

// Integer vector of length n summing to zero (all zeros when n == 1).
std::vector<std::int64_t> zero_sum(Rng& rng, int n) {
  std::vector<std::int64_t> raw(static_cast<std::size_t>(n));
  for (auto& r : raw) r = uniform_int(rng, -3, 3);
  const std::int64_t total = std::accumulate(raw.begin(), raw.end(), std::int64_t{0});
  for (auto& r : raw) r = r * n - total;
  return raw;
}

}  // namespace

FiniteModel random_finite_model(Rng& rng, const RandomFiniteOptions& options) {
  const int k1 = uniform_int(rng, 1, options.max_private_range);
  const int k2 = uniform_int(rng, 1, options.max_private_range);
  const int t = uniform_int(rng, 2, options.max_target_range);
  const double keep = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
  std::bernoulli_distribution coin(keep);

  std::vector<Atom> atoms;
  for (int h1 = 0; h1 < k1; ++h1) {
    for (int h2 = 0; h2 < k2; ++h2) {
      for (int y = 0; y < t; ++y) {
        if (atoms.size() < options.max_atoms && coin(rng)) {
          atoms.push_back({{h1, h2, y}, Rational(uniform_int(rng, 1, 9))});
        }
      }
    }
  }
  if (atoms.empty()) atoms.push_back({{0, 0, 0}, Rational(1)});
  return two_expert_model(two_expert_variables(k1, k2, t), std::move(atoms));
}

FiniteModel random_independent_model(Rng& rng, const RandomFiniteOptions& options) {
  const int k1 = uniform_int(rng, 1, options.max_private_range);
  const int k2 = uniform_int(rng, 1, options.max_private_range);
  const int t = uniform_int(rng, 2, options.max_target_range);
  auto positive = [&](int n) {
    std::vector<std::int64_t> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = uniform_int(rng, 1, 5);
    return v;
  };
  const auto p1 = positive(k1);
  const auto p2 = positive(k2);
  const auto py = positive(t);
  const auto u = zero_sum(rng, k1);
  const auto w = zero_sum(rng, k2);
  std::vector<std::int64_t> ty(static_cast<std::size_t>(t));
  for (auto& x : ty) x = uniform_int(rng, -2, 2);

  // Scale the product part so every weight stays non-negative.
  std::int64_t scale = 1;
  for (int a = 0; a < k1; ++a) {
    for (int b = 0; b < k2; ++b) {
      for (int y = 0; y < t; ++y) {
        const std::int64_t base = p1[a] * p2[b] * py[y];
        const std::int64_t bump = std::abs(u[a] * w[b] * ty[y]);
        scale = std::max(scale, (bump + base - 1) / base);
      }
    }
  }
  const bool exact_zero_allowed = std::bernoulli_distribution(0.5)(rng);
  if (!exact_zero_allowed) ++scale;

  std::vector<Atom> atoms;
  for (int a = 0; a < k1; ++a) {
    for (int b = 0; b < k2; ++b) {
      for (int y = 0; y < t; ++y) {
        const std::int64_t weight = scale * p1[a] * p2[b] * py[y] + u[a] * w[b] * ty[y];
        if (weight > 0) atoms.push_back({{a, b, y}, Rational(weight)});
      }
    }
  }
  return two_expert_model(two_expert_variables(k1, k2, t), std::move(atoms));
}

GaussianModel random_gaussian_model(Rng& rng, std::size_t k, std::size_t h) {
  const auto n = static_cast<Eigen::Index>(k + h + 1);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd b(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) b(i, j) = normal(rng);
  }
  Eigen::MatrixXd sigma = b * b.transpose() / static_cast<double>(n) +
                          0.1 * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd mean(n);
  for (Eigen::Index i = 0; i < n; ++i) mean(i) = normal(rng);
  return GaussianModel(k, h, mean, sigma);
}

Eigen::VectorXd sample_normal(Rng& rng, const Eigen::VectorXd& mean, const Eigen::MatrixXd& lower) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd e(mean.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = normal(rng);
  return mean + lower * e;
}

}  // namespace pmarket
