#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "itmc/model.hpp"
#include "itmc/rng.hpp"
#include "itmc/state_space.hpp"

namespace itmc {

/// Prior of one parameter. Normal priors act on the raw value; log-normal
/// priors act on the log of a positive parameter, and the random-walk
/// proposal for that parameter runs on the log scale.
struct ParamPrior {
  enum class Kind { Normal, LogNormal };
  Kind kind = Kind::Normal;
  double location = 0.0;  // mean (of the log for LogNormal)
  double variance = 1.0;  // variance (of the log for LogNormal)

  static ParamPrior normal(double mean, double variance) { return {Kind::Normal, mean, variance}; }
  static ParamPrior log_normal(double log_mean, double log_variance) {
    return {Kind::LogNormal, log_mean, log_variance};
  }

  /// Log-density of the raw parameter value.
  double logdensity(double value) const;
  /// Prior median on the raw scale.
  double center() const;
};

struct ChainConfig {
  std::size_t iterations = 1000;  // total sweeps, burn-in included
  std::size_t burn_in = 500;
  std::size_t thin = 1;
  std::size_t num_particles = 20;
  /// Componentwise Metropolis sweeps over theta per state update.
  std::size_t theta_sweeps = 3;
  double initial_step = 0.1;  // proposal std. dev. on the transformed scale
  /// Adds a joint random-walk move per theta sweep once burn-in has produced
  /// enough history; its covariance is learned during burn-in and then frozen.
  bool block_updates = true;
  std::optional<ParamVector> initial_theta;
};

struct ChainResult {
  PosteriorDraws draws;
  double acceptance_rate = 0.0;        // post burn-in, over all theta proposals
  std::vector<double> step_sizes;      // adapted proposal scales
  ParamVector last_theta;
  std::vector<State> last_states;
};

/// Metropolis-within-particle-Gibbs: alternates a PGAS update of the latent
/// trajectory given theta with componentwise random-walk Metropolis updates
/// of theta given the trajectory, targeting w(theta | y) for the prior
/// given. Step sizes adapt during burn-in toward an acceptance rate of 0.3
/// (componentwise) and 0.25 (joint moves).
ChainResult pg_parameter_chain(const StateSpaceModel& model, const Trajectory& y,
                               std::span<const ParamPrior> priors, const ChainConfig& config,
                               const RngStream& rng);

/// Posterior sampler backed by a stored set of (correlated) draws; draw(n)
/// returns n evenly spaced draws, or uniform resamples when n exceeds the
/// stored count.
class EmpiricalPosteriorSampler final : public PosteriorSampler {
 public:
  explicit EmpiricalPosteriorSampler(PosteriorDraws draws);
  PosteriorDraws draw(std::size_t n, const RngStream& rng) const override;

 private:
  PosteriorDraws draws_;
};

}  // namespace itmc
