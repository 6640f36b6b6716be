#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pmarket/distributions.hpp"

namespace pmarket {

/// Jointly normal (X, Z, Y): X is the k-dimensional block seen by expert 1,
/// Z the h-dimensional block seen by expert 2, Y the scalar target, in that
/// order.
class GaussianModel {
 public:
  /// Throws InvalidModel unless the dispersion is symmetric (1e-10 relative)
  /// and positive definite, and every dimension matches.
  GaussianModel(std::size_t k, std::size_t h, Eigen::VectorXd mean, Eigen::MatrixXd dispersion,
                std::vector<std::string> names = {});

  std::size_t k() const { return k_; }
  std::size_t h() const { return h_; }
  /// k + h, the dimension of the predictor vector W = (X, Z).
  std::size_t predictors() const { return k_ + h_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& dispersion() const { return dispersion_; }
  const std::vector<std::string>& names() const { return names_; }

  Eigen::MatrixXd predictor_dispersion() const;
  Eigen::VectorXd predictor_target_covariance() const;
  double target_variance() const;
  double target_mean() const;

 private:
  std::size_t k_;
  std::size_t h_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd dispersion_;
  std::vector<std::string> names_;
};

/// S = coefficients . W + intercept, with its realized value.
struct LinearStatistic {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  double value = 0.0;
};

/// Coordinate statistic W_index with the given value.
LinearStatistic coordinate_statistic(std::size_t predictors, std::size_t index, double value);

enum class ExpertBlock { x, z };

struct LinearAnnouncement {
  ExpertBlock expert;
  GaussianDist forecast;
};

/// Public knowledge of the linear market: the revealed statistics, each
/// linearly independent of its predecessors.
struct PublicSpan {
  std::vector<LinearStatistic> statistics;
  std::vector<LinearAnnouncement> log;
};

/// Relative rank tolerance: a functional lies in a span when its residual
/// 2-norm is below this times (1 + its norm).
inline constexpr double kRankTolerance = 1e-9;

/// Residual 2-norm of `functional` after projecting out span(basis).
double span_residual(const Eigen::VectorXd& functional, std::span<const LinearStatistic> basis);

/// Normal conditional of Y given the realized statistics. Statistics that
/// lie in the span of earlier ones are dropped after checking their value
/// is consistent. Throws SingularConditioningSet when it is not.
GaussianDist conditional_gaussian(const GaussianModel& model,
                                  std::span<const LinearStatistic> statistics);

struct ExpertTurn {
  GaussianDist forecast;
  /// The mean functional with its realized value, when it is new to the
  /// public span.
  std::optional<LinearStatistic> revealed;
};

/// One announcement: condition on the expert's own coordinates plus the
/// public statistics; the announced mean reveals the regression functional.
ExpertTurn expert_turn(const GaussianModel& model, ExpertBlock expert,
                       const Eigen::VectorXd& private_values, const PublicSpan& span);

struct LinearTraceEntry {
  std::size_t round;  // 1-based
  ExpertBlock expert;
  GaussianDist forecast;
  bool new_statistic_added;
};

struct LinearMarketTrace {
  std::vector<LinearTraceEntry> entries;
  bool converged = false;
  /// First round from which both announcements equal the limit within 1e-10.
  std::size_t rounds_to_convergence = 0;
  /// Rounds played, including the final confirming round.
  std::size_t rounds_executed = 0;
  /// rounds_to_convergence <= min(k, h) + 2.
  bool within_round_bound = false;
  PublicSpan final_span;

  const GaussianDist& limit() const { return entries.back().forecast; }
};

inline constexpr double kMeanConvergenceTolerance = 1e-10;

/// Alternates the two experts, starting with `first`, until a full round
/// adds no statistic and neither expert's mean moves by 1e-10.
/// Throws MaxRoundsExceeded.
LinearMarketTrace run_linear_market(const GaussianModel& model, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& z, std::size_t max_rounds,
                                    ExpertBlock first = ExpertBlock::x);

/// Forecast from the pooled (X, Z).
GaussianDist pooled_gaussian(const GaussianModel& model, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& z);

/// Forecast from one block alone (the expert's pre-market opinion).
GaussianDist solo_forecast(const GaussianModel& model, ExpertBlock expert,
                           const Eigen::VectorXd& values);

/// Fixed-point check at a converged span: for each expert, adding its own
/// block to the public statistics changes neither mean nor sd by more than
/// `tolerance`. Returns {expert 1, expert 2}.
std::vector<bool> verify_linear_fixed_point(const GaussianModel& model, const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& z, const PublicSpan& span,
                                            double tolerance = 1e-8);

}  // namespace pmarket
