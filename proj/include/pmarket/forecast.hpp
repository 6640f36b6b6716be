#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "pmarket/distributions.hpp"
#include "pmarket/finite_engine.hpp"

namespace pmarket {

/// An announced predictive object of any engine.
using Forecast = std::variant<Posterior, GaussianDist, GaussianMixture>;

enum class Classification { vacuous, limited, complete };
enum class CompareMode { exact, tolerance };

std::string_view to_string(Classification c);
std::string_view to_string(CompareMode m);

/// Distance used to compare continuous forecasts. Normals: max(|mean gap|,
/// |sd gap|). Mixtures (a normal counts as one component): components that
/// coincide are merged, the rest are aligned by descending weight, and the
/// distance is the largest weight, mean or sd gap; +inf when the component
/// counts differ. Throws KindMismatch for a finite forecast.
double forecast_distance(const Forecast& a, const Forecast& b);

/// Exact equality for finite forecasts, distance <= tolerance otherwise.
/// Throws KindMismatch if one side is finite and the other continuous.
bool forecasts_equal(const Forecast& a, const Forecast& b, CompareMode mode,
                     double tolerance = 1e-8);

/// complete if limit == pooled, else vacuous if limit == prior, else
/// limited. A limit equal to both (private data that pools to nothing) is
/// complete. Finite forecasts are always compared exactly; `mode` and
/// `tolerance` only apply to continuous ones (exact means distance 0).
Classification classify(const Forecast& limit, const Forecast& prior, const Forecast& pooled,
                        CompareMode mode, double tolerance = 1e-8);

}  // namespace pmarket
