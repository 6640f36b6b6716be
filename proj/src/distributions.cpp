#include "pmarket/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pmarket/errors.hpp"

namespace pmarket {

GaussianDist::GaussianDist(double mean, double variance) : mean_(mean), variance_(variance) {
  if (!std::isfinite(mean) || !std::isfinite(variance) || !(variance > 0.0)) {
    throw InvalidModel("gaussian needs finite mean and positive variance, got N(" +
                       std::to_string(mean) + ", " + std::to_string(variance) + ")");
  }
}

double GaussianDist::sd() const { return std::sqrt(variance_); }

double GaussianDist::pdf(double x) const {
  const double s = sd();
  return std_normal_pdf((x - mean_) / s) / s;
}

GaussianMixture::GaussianMixture(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw InvalidModel("mixture with no components");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight >= 0.0)) throw InvalidModel("mixture weight must be non-negative");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidModel("mixture weights sum to " + std::to_string(total) + ", expected 1");
  }
}

GaussianMixture::GaussianMixture(const GaussianDist& dist)
    : components_{MixtureComponent{1.0, dist}} {}

double GaussianMixture::pdf(double x) const {
  double out = 0.0;
  for (const auto& c : components_) out += c.weight * c.dist.pdf(x);
  return out;
}

std::pair<double, double> mixture_mean_var(const GaussianMixture& m) {
  double mean = 0.0;
  double second = 0.0;
  for (const auto& c : m.components()) {
    mean += c.weight * c.dist.mean();
    second += c.weight * (c.dist.variance() + c.dist.mean() * c.dist.mean());
  }
  return {mean, std::max(0.0, second - mean * mean)};
}

double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace pmarket
