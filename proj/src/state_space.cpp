#include "itmc/state_space.hpp"

#include "itmc/errors.hpp"
#include "itmc/particle.hpp"

namespace itmc {

double log_joint_density(const StateSpaceModel& model, const ParamVector& theta, std::span<const State> states,
                         const Trajectory& y) {
  if (states.size() != y.size()) throw InvalidArgument("log_joint_density: states and data differ in length");
  if (states.empty()) throw InvalidArgument("log_joint_density: empty trajectory");
  double lp = model.initial_logdensity(theta, states[0]);
  for (std::size_t t = 0; t < states.size(); ++t) {
    if (t > 0) lp += model.transition_logdensity(theta, states[t], states[t - 1], input_at(y, t - 1), t - 1);
    lp += model.observation_logdensity(theta, y.observations[t], states[t], t);
  }
  return lp;
}

SimulatedStateSpace simulate_state_space(const StateSpaceModel& model, const ParamVector& theta,
                                         std::span<const double> inputs, std::size_t length, const RngStream& rng) {
  if (!inputs.empty()) length = inputs.size();
  if (length == 0) throw InvalidArgument("simulate_state_space: length must be at least 1");
  Engine engine = rng.engine();
  SimulatedStateSpace out;
  out.states.resize(length);
  out.data.observations.resize(length);
  out.data.inputs.assign(inputs.begin(), inputs.end());
  State x = model.sample_initial_state(theta, engine);
  for (std::size_t t = 0; t < length; ++t) {
    if (t > 0) x = model.sample_transition(theta, x, inputs.empty() ? 0.0 : inputs[t - 1], t - 1, engine);
    out.states[t] = x;
    out.data.observations[t] = model.sample_observation(theta, x, t, engine);
  }
  return out;
}

StateSpaceGenerative::StateSpaceGenerative(const StateSpaceModel& model, std::size_t num_particles)
    : model_(model), num_particles_(num_particles) {
  if (num_particles < 2) throw InvalidArgument("StateSpaceGenerative: need at least two particles");
}

Trajectory StateSpaceGenerative::simulate(const ParamVector& theta, std::span<const double> inputs,
                                          std::size_t length, const RngStream& rng) const {
  if (!inputs.empty() && inputs.size() != length) throw InvalidArgument("StateSpaceGenerative: input length mismatch");
  return simulate_state_space(model_, theta, inputs, length, rng).data;
}

double StateSpaceGenerative::surprisal(const ParamVector& theta, const Trajectory& y, const RngStream& rng) const {
  return -bootstrap_pf(model_, theta, y, num_particles_, rng).log_likelihood;
}

}  // namespace itmc
