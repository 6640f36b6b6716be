#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pmarket/distributions.hpp"

namespace pmarket {

// Limited-consensus model: theta ~ N(mu, 1), X1 ~ N(0, 1) independent of
// theta, X2 | theta, X1 ~ N(theta X1, 1). Expert 1 sees X1, expert 2 sees
// X2, both forecast theta.

/// (s1, s2) = (x1 x2, |x1|), sufficient for theta given (x1, x2).
struct SufficientStat {
  double s1;
  double s2;

  static SufficientStat from(double x1, double x2);
};

struct SignWeights {
  double plus;
  double minus;
};

/// Posterior of theta given the full statistic: N((mu + s1)/(1 + s2^2), 1/(1 + s2^2)).
GaussianDist component_posterior(double s1, double s2, double mu);

/// Density of (X1, X2) with theta integrated out.
double joint_density(double x1, double x2, double mu);

/// P(sign(S1) = +-1 | |S1| = m1, S2 = m2). (1/2, 1/2) when m1 = 0.
/// Throws DegenerateStatistic unless m2 > 0; InvalidModel if m1 < 0.
SignWeights sign_weights(double m1, double m2, double mu);

/// pi(+1) Pi(m1, m2) + pi(-1) Pi(-m1, m2): the posterior given |S1| = m1, S2 = m2.
GaussianMixture mixture_posterior(double m1, double m2, double mu);

/// Mean and variance of the posterior of theta given |X2| only, by adaptive
/// quadrature (relative tolerance 1e-9). Not normal; reported as moments.
GaussianDist posterior_given_abs_x2(double x2, double mu);

/// Checks from the four sign patterns of the joint density that, given
/// |X1| = m2 and |X2| = m1/m2, sign(X1) and sign(X2) are each fair coins
/// conditional on sign(X1 X2), to 1e-12.
bool verify_sign_independence(double mu, double m1, double m2);

/// Posterior of theta given |x1|, |x2| and whichever signs are known,
/// obtained by summing the full-data posterior over every sign pattern
/// compatible with what is known, weighted by the joint density. One
/// component per compatible pattern, unmerged.
GaussianMixture sign_pattern_posterior(double x1, double x2, double mu, bool know_sign_x1,
                                       bool know_sign_x2);

/// The posteriors given (x1, |x2|), (|x1|, x2) and (|x1|, |x2|) agree
/// pointwise within `tolerance` on a grid covering +-8 posterior sds.
bool verify_conditional_invariance(double x1, double x2, double mu, double tolerance = 1e-12);

/// What the public (or an expert) knows about (X1, X2).
struct TsKnowledge {
  bool abs_x1 = false;
  bool sign_x1 = false;
  bool abs_x2 = false;
  bool sign_x2 = false;

  friend bool operator==(const TsKnowledge&, const TsKnowledge&) = default;
};

struct TsAnnouncement {
  std::size_t round;   // 1-based
  std::size_t expert;  // 1 or 2
  GaussianMixture distribution;
  /// False when the announced posterior is not a normal mixture and
  /// `distribution` holds only its mean and variance.
  bool exact;
  /// What the announcement is conditioned on, e.g. "x1,|x2|".
  std::string basis;
};

struct TsTrace {
  std::vector<TsAnnouncement> announcements;
  bool converged = false;
  /// First round from which every announcement equals the limit.
  std::size_t rounds_to_convergence = 0;
  std::size_t rounds_executed = 0;
  GaussianMixture limit;
  GaussianDist prior;
  GaussianDist pooled;
  TsKnowledge final_public;
};

/// Plays the two-expert market, `first_expert` (1 or 2) opening each round,
/// until a round adds nothing to public knowledge.
/// Throws DegenerateStatistic if x1 = 0.
TsTrace run_ts_market(double x1, double x2, double mu, std::size_t first_expert = 1);

}  // namespace pmarket
