#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "itmc/model.hpp"
#include "itmc/rng.hpp"
#include "itmc/state_space.hpp"

namespace itmc {

struct ParticleSystem {
  std::vector<State> particles;
  std::vector<double> log_weights;  // unnormalized
};

struct FilterResult {
  double log_likelihood = 0.0;  // ln of the unbiased likelihood estimate
  ParticleSystem final_particles;
};

/// Bootstrap particle filter with multinomial resampling at every step.
/// Throws ParticleDegeneracy when every weight underflows.
FilterResult bootstrap_pf(const StateSpaceModel& model, const ParamVector& theta, const Trajectory& y,
                          std::size_t num_particles, const RngStream& rng);

/// One conditional particle filter sweep with ancestor sampling.
///
/// The reference trajectory is kept as the last particle and its ancestor is
/// resampled at every step with weights w_{t-1}^i p(x_t^ref | x_{t-1}^i).
/// An empty reference runs an ordinary particle filter, which is how chains
/// are initialized. Returns one trajectory traced back from the final
/// particle system.
std::vector<State> pgas_update(const StateSpaceModel& model, const ParamVector& theta, const Trajectory& y,
                               std::span<const State> reference, std::size_t num_particles,
                               const RngStream& rng);

/// Draws `count` ancestor indices from normalized `weights` (multinomial),
/// returned in nondecreasing order.
void multinomial_resample(std::span<const double> weights, std::size_t count, Engine& engine,
                          std::vector<std::size_t>& out);

}  // namespace itmc
