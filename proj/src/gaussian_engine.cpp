#include "pmarket/gaussian_engine.hpp"

#include <algorithm>
#include <cmath>

#include "pmarket/errors.hpp"

namespace pmarket {

GaussianModel::GaussianModel(std::size_t k, std::size_t h, Eigen::VectorXd mean,
                             Eigen::MatrixXd dispersion, std::vector<std::string> names)
    : k_(k), h_(h), mean_(std::move(mean)), dispersion_(std::move(dispersion)),
      names_(std::move(names)) {
  const auto n = static_cast<Eigen::Index>(k_ + h_ + 1);
  if (k_ == 0 || h_ == 0) throw InvalidModel("both experts need at least one variable");
  if (mean_.size() != n || dispersion_.rows() != n || dispersion_.cols() != n) {
    throw InvalidModel("mean/dispersion dimensions do not match k + h + 1");
  }
  if (!dispersion_.allFinite() || !mean_.allFinite()) throw InvalidModel("non-finite model entry");
  const double scale = dispersion_.cwiseAbs().maxCoeff();
  if ((dispersion_ - dispersion_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InvalidModel("dispersion matrix is not symmetric");
  }
  dispersion_ = 0.5 * (dispersion_ + dispersion_.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(dispersion_);
  if (llt.info() != Eigen::Success) throw InvalidModel("dispersion matrix is not positive definite");
  if (names_.empty()) {
    for (std::size_t i = 0; i < k_; ++i) names_.push_back("X" + std::to_string(i + 1));
    for (std::size_t i = 0; i < h_; ++i) names_.push_back("Z" + std::to_string(i + 1));
    names_.push_back("Y");
  } else if (names_.size() != k_ + h_ + 1) {
    throw InvalidModel("expected k + h + 1 variable names");
  }
}

Eigen::MatrixXd GaussianModel::predictor_dispersion() const {
  const auto p = static_cast<Eigen::Index>(predictors());
  return dispersion_.topLeftCorner(p, p);
}

Eigen::VectorXd GaussianModel::predictor_target_covariance() const {
  const auto p = static_cast<Eigen::Index>(predictors());
  return dispersion_.col(p).head(p);
}

double GaussianModel::target_variance() const {
  const auto p = static_cast<Eigen::Index>(predictors());
  return dispersion_(p, p);
}

double GaussianModel::target_mean() const { return mean_(static_cast<Eigen::Index>(predictors())); }

LinearStatistic coordinate_statistic(std::size_t predictors, std::size_t index, double value) {
  LinearStatistic s;
  s.coefficients = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(predictors),
                                         static_cast<Eigen::Index>(index));
  s.value = value;
  return s;
}

namespace {

// Orthonormal basis grown by Gram-Schmidt with one reorthogonalisation pass.
class SpanBasis {
 public:
  explicit SpanBasis(Eigen::Index dim) : dim_(dim) {}

  Eigen::VectorXd residual(const Eigen::VectorXd& v) const {
    Eigen::VectorXd r = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis_) r -= q.dot(r) * q;
    }
    return r;
  }

  /// Adds v when it is independent; returns whether it was added.
  bool try_add(const Eigen::VectorXd& v) {
    Eigen::VectorXd r = residual(v);
    const double norm = r.norm();
    if (norm < kRankTolerance * (1.0 + v.norm())) return false;
    basis_.push_back(r / norm);
    return true;
  }

  Eigen::Index dim() const { return dim_; }

 private:
  Eigen::Index dim_;
  std::vector<Eigen::VectorXd> basis_;
};

struct Regression {
  GaussianDist dist;
  Eigen::VectorXd functional;
  double intercept;
};

Regression regress(const GaussianModel& model, std::span<const LinearStatistic> statistics) {
  const auto p = static_cast<Eigen::Index>(model.predictors());
  const Eigen::VectorXd mu_w = model.mean().head(p);
  SpanBasis basis(p);
  std::vector<const LinearStatistic*> kept;
  std::vector<const LinearStatistic*> dropped;
  for (const auto& s : statistics) {
    if (s.coefficients.size() != p) {
      throw InvalidModel("statistic has " + std::to_string(s.coefficients.size()) +
                         " coefficients, model has " + std::to_string(p) + " predictors");
    }
    if (!s.coefficients.allFinite() || !std::isfinite(s.value) || !std::isfinite(s.intercept)) {
      throw InvalidModel("non-finite statistic");
    }
    (basis.try_add(s.coefficients) ? kept : dropped).push_back(&s);
  }

  const auto m = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXd a(m, p);
  Eigen::VectorXd centered(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    a.row(i) = kept[i]->coefficients.transpose();
    centered(i) = kept[i]->value - kept[i]->intercept;
  }

  if (!dropped.empty()) {
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a.transpose());
    for (const auto* s : dropped) {
      const Eigen::VectorXd lambda = qr.solve(s->coefficients);
      const double predicted = lambda.dot(centered);
      const double actual = s->value - s->intercept;
      const double scale = 1.0 + std::abs(actual) + lambda.cwiseProduct(centered).cwiseAbs().sum();
      if (std::abs(predicted - actual) > 1e-7 * scale) {
        throw SingularConditioningSet("dependent statistic with inconsistent value (" +
                                      std::to_string(actual) + " vs implied " +
                                      std::to_string(predicted) + ")");
      }
    }
  }

  if (m == 0) {
    return {GaussianDist(model.target_mean(), model.target_variance()), Eigen::VectorXd::Zero(p),
            model.target_mean()};
  }
  // Whiten the predictors (Sigma_W = L L^T) and take a thin QR of (A L)^T, so
  // the statistics' covariance is never formed. Extended precision keeps
  // the nearly dependent statistics of late rounds usable.
  using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using VectorL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const Eigen::LLT<MatrixL> chol(model.predictor_dispersion().cast<long double>());
  const MatrixL lower = chol.matrixL();
  const MatrixL a_l = a.cast<long double>();
  const VectorL g = lower.triangularView<Eigen::Lower>().solve(
      model.predictor_target_covariance().cast<long double>());
  const Eigen::HouseholderQR<MatrixL> qr((a_l * lower).transpose());
  const MatrixL q = qr.householderQ() * MatrixL::Identity(p, m);
  const MatrixL r = qr.matrixQR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
  const long double largest = r.diagonal().cwiseAbs().maxCoeff();
  if (!(r.diagonal().cwiseAbs().minCoeff() > 1e-15L * largest)) {
    throw SingularConditioningSet("covariance of the conditioning statistics is singular");
  }
  const VectorL t = q.transpose() * g;
  const long double variance_l =
      static_cast<long double>(model.target_variance()) - t.squaredNorm();
  const double variance = static_cast<double>(variance_l);
  if (!(variance > 0.0)) {
    throw SingularConditioningSet("non-positive conditional variance");
  }
  const VectorL beta = r.triangularView<Eigen::Upper>().solve(t);
  const VectorL deviation = centered.cast<long double>() - a_l * mu_w.cast<long double>();
  const double mean =
      static_cast<double>(static_cast<long double>(model.target_mean()) + beta.dot(deviation));
  const Eigen::VectorXd functional = (a_l.transpose() * beta).cast<double>();
  const double intercept = model.target_mean() - functional.dot(mu_w);
  return {GaussianDist(mean, variance), functional, intercept};
}

std::pair<std::size_t, std::size_t> block_range(const GaussianModel& model, ExpertBlock expert) {
  return expert == ExpertBlock::x ? std::pair{std::size_t{0}, model.k()}
                                  : std::pair{model.k(), model.h()};
}

std::vector<LinearStatistic> own_coordinates(const GaussianModel& model, ExpertBlock expert,
                                             const Eigen::VectorXd& values) {
  const auto [offset, count] = block_range(model, expert);
  if (static_cast<std::size_t>(values.size()) != count) {
    throw InvalidModel("private values have dimension " + std::to_string(values.size()) +
                       ", block has " + std::to_string(count));
  }
  std::vector<LinearStatistic> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(coordinate_statistic(model.predictors(), offset + i,
                                       values(static_cast<Eigen::Index>(i))));
  }
  return out;
}

bool same_forecast(const GaussianDist& a, const GaussianDist& b) {
  return std::abs(a.mean() - b.mean()) < kMeanConvergenceTolerance &&
         std::abs(a.sd() - b.sd()) < kMeanConvergenceTolerance;
}

}  // namespace

double span_residual(const Eigen::VectorXd& functional, std::span<const LinearStatistic> basis) {
  SpanBasis span(functional.size());
  for (const auto& s : basis) span.try_add(s.coefficients);
  return span.residual(functional).norm();
}

GaussianDist conditional_gaussian(const GaussianModel& model,
                                  std::span<const LinearStatistic> statistics) {
  return regress(model, statistics).dist;
}

ExpertTurn expert_turn(const GaussianModel& model, ExpertBlock expert,
                       const Eigen::VectorXd& private_values, const PublicSpan& span) {
  std::vector<LinearStatistic> conditioning = own_coordinates(model, expert, private_values);
  conditioning.insert(conditioning.end(), span.statistics.begin(), span.statistics.end());
  const Regression reg = regress(model, conditioning);

  ExpertTurn turn{reg.dist, std::nullopt};
  const double residual = span_residual(reg.functional, span.statistics);
  if (residual >= kRankTolerance * (1.0 + reg.functional.norm())) {
    turn.revealed = LinearStatistic{reg.functional, reg.intercept, reg.dist.mean()};
  }
  return turn;
}

LinearMarketTrace run_linear_market(const GaussianModel& model, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& z, std::size_t max_rounds,
                                    ExpertBlock first) {
  if (static_cast<std::size_t>(x.size()) != model.k() ||
      static_cast<std::size_t>(z.size()) != model.h()) {
    throw InvalidModel("realization dimensions do not match the model blocks");
  }
  const ExpertBlock second = first == ExpertBlock::x ? ExpertBlock::z : ExpertBlock::x;
  LinearMarketTrace trace;
  PublicSpan& span = trace.final_span;
  std::optional<GaussianDist> previous[2];

  for (std::size_t round = 1; round <= max_rounds; ++round) {
    bool added = false;
    bool moved = false;
    int slot = 0;
    for (ExpertBlock expert : {first, second}) {
      const ExpertTurn turn =
          expert_turn(model, expert, expert == ExpertBlock::x ? x : z, span);
      trace.entries.push_back({round, expert, turn.forecast, turn.revealed.has_value()});
      span.log.push_back({expert, turn.forecast});
      if (turn.revealed) {
        span.statistics.push_back(*turn.revealed);
        added = true;
      }
      if (!previous[slot] ||
          std::abs(previous[slot]->mean() - turn.forecast.mean()) >= kMeanConvergenceTolerance) {
        moved = true;
      }
      previous[slot++] = turn.forecast;
    }
    if (!added && !moved) {
      trace.converged = true;
      trace.rounds_executed = round;
      break;
    }
  }
  if (!trace.converged) {
    throw MaxRoundsExceeded("linear market did not converge within " + std::to_string(max_rounds) +
                            " rounds");
  }

  const GaussianDist limit = trace.limit();
  trace.rounds_to_convergence = trace.rounds_executed;
  for (auto it = trace.entries.rbegin(); it != trace.entries.rend(); ++it) {
    if (!same_forecast(it->forecast, limit)) {
      trace.rounds_to_convergence = it->round + 1;
      break;
    }
    trace.rounds_to_convergence = it->round;
  }
  trace.within_round_bound = trace.rounds_to_convergence <= std::min(model.k(), model.h()) + 2;
  return trace;
}

GaussianDist pooled_gaussian(const GaussianModel& model, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& z) {
  std::vector<LinearStatistic> stats = own_coordinates(model, ExpertBlock::x, x);
  const auto more = own_coordinates(model, ExpertBlock::z, z);
  stats.insert(stats.end(), more.begin(), more.end());
  return conditional_gaussian(model, stats);
}

GaussianDist solo_forecast(const GaussianModel& model, ExpertBlock expert,
                           const Eigen::VectorXd& values) {
  return conditional_gaussian(model, own_coordinates(model, expert, values));
}

std::vector<bool> verify_linear_fixed_point(const GaussianModel& model, const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& z, const PublicSpan& span,
                                            double tolerance) {
  const GaussianDist common = conditional_gaussian(model, span.statistics);
  std::vector<bool> out;
  for (ExpertBlock expert : {ExpertBlock::x, ExpertBlock::z}) {
    auto stats = own_coordinates(model, expert, expert == ExpertBlock::x ? x : z);
    stats.insert(stats.end(), span.statistics.begin(), span.statistics.end());
    const GaussianDist own = conditional_gaussian(model, stats);
    out.push_back(std::abs(own.mean() - common.mean()) <= tolerance &&
                  std::abs(own.sd() - common.sd()) <= tolerance);
  }
  return out;
}

}  // namespace pmarket
