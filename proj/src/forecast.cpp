#include "pmarket/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmarket/errors.hpp"

namespace pmarket {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::vacuous: return "vacuous";
    case Classification::limited: return "limited";
    case Classification::complete: return "complete";
  }
  return "unknown";
}

std::string_view to_string(CompareMode m) { return m == CompareMode::exact ? "exact" : "tolerance"; }

namespace {

constexpr double kMergeTolerance = 1e-12;

std::vector<MixtureComponent> as_components(const Forecast& f) {
  if (const auto* g = std::get_if<GaussianDist>(&f)) return {{1.0, *g}};
  if (const auto* m = std::get_if<GaussianMixture>(&f)) return m->components();
  throw KindMismatch("finite forecast compared with a continuous one");
}

std::vector<MixtureComponent> canonical(std::vector<MixtureComponent> comps) {
  std::vector<MixtureComponent> merged;
  for (const auto& c : comps) {
    auto same = std::find_if(merged.begin(), merged.end(), [&](const MixtureComponent& m) {
      return std::abs(m.dist.mean() - c.dist.mean()) <= kMergeTolerance &&
             std::abs(m.dist.variance() - c.dist.variance()) <= kMergeTolerance;
    });
    if (same != merged.end()) {
      same->weight += c.weight;
    } else {
      merged.push_back(c);
    }
  }
  std::erase_if(merged, [](const MixtureComponent& m) { return m.weight <= kMergeTolerance; });
  std::sort(merged.begin(), merged.end(), [](const MixtureComponent& a, const MixtureComponent& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.dist.mean() < b.dist.mean();
  });
  return merged;
}

}  // namespace

double forecast_distance(const Forecast& a, const Forecast& b) {
  const auto ca = canonical(as_components(a));
  const auto cb = canonical(as_components(b));
  if (ca.size() != cb.size()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  const bool single = ca.size() == 1;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (!single) d = std::max(d, std::abs(ca[i].weight - cb[i].weight));
    d = std::max(d, std::abs(ca[i].dist.mean() - cb[i].dist.mean()));
    d = std::max(d, std::abs(ca[i].dist.sd() - cb[i].dist.sd()));
  }
  return d;
}

bool forecasts_equal(const Forecast& a, const Forecast& b, CompareMode mode, double tolerance) {
  const auto* pa = std::get_if<Posterior>(&a);
  const auto* pb = std::get_if<Posterior>(&b);
  if ((pa == nullptr) != (pb == nullptr)) {
    throw KindMismatch("finite forecast compared with a continuous one");
  }
  if (pa != nullptr) return *pa == *pb;
  const double d = forecast_distance(a, b);
  return mode == CompareMode::exact ? d == 0.0 : d <= tolerance;
}

Classification classify(const Forecast& limit, const Forecast& prior, const Forecast& pooled,
                        CompareMode mode, double tolerance) {
  if (forecasts_equal(limit, pooled, mode, tolerance)) return Classification::complete;
  if (forecasts_equal(limit, prior, mode, tolerance)) return Classification::vacuous;
  return Classification::limited;
}

}  // namespace pmarket
