#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "itmc/model.hpp"
#include "itmc/rng.hpp"

namespace itmc {

inline constexpr std::size_t kMaxStateDim = 2;

/// Latent state; entries beyond the model's state_dim() are unused and zero.
using State = std::array<double, kMaxStateDim>;

/// Nonlinear state-space model class
///
///   x_0     ~ p(x_0 | theta)
///   x_{t+1} ~ p(x_{t+1} | x_t, u_t, theta)
///   y_t     ~ p(y_t | x_t, theta)
///
/// The log-densities must be exact for the corresponding samplers: ancestor
/// sampling and the parameter updates of the particle Gibbs chain rely on
/// them. Densities may be taken with respect to a mixed dominating measure
/// (for example Lebesgue plus atoms at clamping bounds), as long as every
/// method uses the same one.
class StateSpaceModel {
 public:
  virtual ~StateSpaceModel() = default;

  virtual std::size_t state_dim() const = 0;
  virtual std::size_t param_dim() const = 0;

  virtual State sample_initial_state(const ParamVector& theta, Engine& engine) const = 0;
  virtual double initial_logdensity(const ParamVector& theta, const State& x) const = 0;

  virtual State sample_transition(const ParamVector& theta, const State& x, double input, std::size_t t,
                                  Engine& engine) const = 0;
  virtual double transition_logdensity(const ParamVector& theta, const State& next, const State& x,
                                       double input, std::size_t t) const = 0;

  virtual double sample_observation(const ParamVector& theta, const State& x, std::size_t t,
                                    Engine& engine) const = 0;
  virtual double observation_logdensity(const ParamVector& theta, double y, const State& x,
                                        std::size_t t) const = 0;

  /// Process noise implied by a transition, divided by its standard
  /// deviation, one entry per state dimension. Used by residual checks on
  /// smoothed trajectories.
  virtual State standardized_process_noise(const ParamVector& theta, const State& next, const State& x,
                                           double input, std::size_t t) const = 0;
};

/// Input u_t for time t, or 0 for records without inputs.
inline double input_at(const Trajectory& y, std::size_t t) { return y.has_inputs() ? y.inputs[t] : 0.0; }

/// ln p(x_{0:T-1}, y_{0:T-1} | theta).
double log_joint_density(const StateSpaceModel& model, const ParamVector& theta, std::span<const State> states,
                         const Trajectory& y);

/// Adapts a state-space class to the generative-model contract: simulate by
/// ancestral sampling, surprisal by the negated bootstrap particle filter
/// log-likelihood estimate with a fixed particle count.
class StateSpaceGenerative final : public GenerativeModel {
 public:
  StateSpaceGenerative(const StateSpaceModel& model, std::size_t num_particles);

  std::size_t param_dim() const override { return model_.param_dim(); }
  Trajectory simulate(const ParamVector& theta, std::span<const double> inputs, std::size_t length,
                      const RngStream& rng) const override;
  double surprisal(const ParamVector& theta, const Trajectory& y, const RngStream& rng) const override;
  bool surprisal_is_estimated() const override { return true; }

 private:
  const StateSpaceModel& model_;
  std::size_t num_particles_;
};

struct SimulatedStateSpace {
  Trajectory data;
  std::vector<State> states;
};

/// Ancestral simulation of a state-space model driven by `inputs` (empty for
/// autonomous models, in which case `length` is used).
SimulatedStateSpace simulate_state_space(const StateSpaceModel& model, const ParamVector& theta,
                                         std::span<const double> inputs, std::size_t length, const RngStream& rng);

}  // namespace itmc
