#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "pmarket/finite_engine.hpp"
#include "pmarket/gaussian_engine.hpp"

namespace pmarket {

using Rng = std::mt19937_64;

/// Independent, reproducible stream for run `index` of a batch seeded by `seed`.
Rng stream_for(std::uint64_t seed, std::uint64_t index);

struct RandomFiniteOptions {
  int max_private_range = 6;  // |range(H_i)| drawn from 1..max
  int max_target_range = 2;   // |range(target)| drawn from 2..max
  std::size_t max_atoms = 200;
};

/// Two experts, H1 in 0..K1-1, H2 in 0..K2-1, no comments. Each cell of the
/// H1 x H2 x target grid is kept with a random probability and given a
/// random integer weight; the table is then normalized.
FiniteModel random_finite_model(Rng& rng, const RandomFiniteOptions& options = {});

/// Two experts whose private variables are each marginally independent of
/// the target while the pair generally is not: product weights plus a
/// perturbation u(h1) w(h2) t(y) with u and w summing to zero.
FiniteModel random_independent_model(Rng& rng, const RandomFiniteOptions& options = {});

/// Random mean and positive definite dispersion over (X, Z, Y).
GaussianModel random_gaussian_model(Rng& rng, std::size_t k, std::size_t h);

/// Draw from N(mean, L L^T) given the lower Cholesky factor.
Eigen::VectorXd sample_normal(Rng& rng, const Eigen::VectorXd& mean, const Eigen::MatrixXd& lower);

}  // namespace pmarket
