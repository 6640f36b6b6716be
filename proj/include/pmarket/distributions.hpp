#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace pmarket {

/// Univariate normal N(mean, variance).
class GaussianDist {
 public:
  /// Throws InvalidModel unless variance > 0 and both fields are finite.
  GaussianDist(double mean, double variance);

  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double sd() const;
  double pdf(double x) const;

  friend bool operator==(const GaussianDist&, const GaussianDist&) = default;

 private:
  double mean_;
  double variance_;
};

struct MixtureComponent {
  double weight;
  GaussianDist dist;

  friend bool operator==(const MixtureComponent&, const MixtureComponent&) = default;
};

/// Finite mixture of normals. Components are stored as given, never merged.
class GaussianMixture {
 public:
  /// Weights must be non-negative and sum to 1 within 1e-12.
  explicit GaussianMixture(std::vector<MixtureComponent> components);
  /// Single-component mixture.
  explicit GaussianMixture(const GaussianDist& dist);

  const std::vector<MixtureComponent>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  double pdf(double x) const;

  friend bool operator==(const GaussianMixture&, const GaussianMixture&) = default;

 private:
  std::vector<MixtureComponent> components_;
};

/// (sum w_i mu_i, sum w_i (sigma_i^2 + mu_i^2) - mean^2), variance clamped at 0.
std::pair<double, double> mixture_mean_var(const GaussianMixture& m);

/// Standard normal density.
double std_normal_pdf(double z);

}  // namespace pmarket
