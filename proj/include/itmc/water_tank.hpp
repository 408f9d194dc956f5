#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "itmc/model.hpp"
#include "itmc/pg_chain.hpp"
#include "itmc/state_space.hpp"

namespace itmc {

enum class WaterTankVariant {
  Original,  // laminar outflow only: theta = (k1, k2, k3, s2w1, s2w2, s2obs)
  Extended,  // with linear outflow terms: theta = (k1, k2, k3, k4, k5, s2w1, s2w2, s2obs)
};

struct WaterTankParams {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
  double k5 = 0.0;
  double var_w1 = 0.0;   // process noise intensity, upper tank
  double var_w2 = 0.0;   // process noise intensity, lower tank
  double var_obs = 0.0;  // measurement noise variance
};

struct WaterTankConfig {
  WaterTankVariant variant = WaterTankVariant::Extended;
  double dt = 4.0;  // seconds per sample
  double capacity_upper = 10.0;
  double capacity_lower = 10.0;
  State initial_mean{3.0, 3.0};
  State initial_var{0.25, 0.25};
};

/// Euler-discretized cascaded water tanks with overflow:
///
///   m1  = x1 + dt (-k1 sqrt(x1) - k4 x1 + k2 u)
///   m2  = x2 + dt ( k1 sqrt(x1) + k4 x1 - k3 sqrt(x2) - k5 x2) + max(m1 - c1, 0)
///   x1' = clamp(m1 + sqrt(dt s2w1) e1, 0, c1)
///   x2' = clamp(m2 + sqrt(dt s2w2) e2, 0, c2)
///   y   = x2 + sqrt(s2obs) e3
///
/// Clamping puts atoms at 0 and at capacity, so transition densities are
/// censored Gaussians: the Gaussian pdf in the interior and the Gaussian
/// tail mass at each bound. The initial state is clamped in the same way.
class WaterTankModel final : public StateSpaceModel {
 public:
  explicit WaterTankModel(WaterTankConfig config = {});

  const WaterTankConfig& config() const { return config_; }

  std::size_t state_dim() const override { return 2; }
  std::size_t param_dim() const override;

  WaterTankParams unpack(const ParamVector& theta) const;
  ParamVector pack(const WaterTankParams& p) const;

  /// Deterministic part of the transition (m1, m2 above).
  State drift(const WaterTankParams& p, const State& x, double input) const;

  State sample_initial_state(const ParamVector& theta, Engine& engine) const override;
  double initial_logdensity(const ParamVector& theta, const State& x) const override;
  State sample_transition(const ParamVector& theta, const State& x, double input, std::size_t t,
                          Engine& engine) const override;
  double transition_logdensity(const ParamVector& theta, const State& next, const State& x, double input,
                               std::size_t t) const override;
  double sample_observation(const ParamVector& theta, const State& x, std::size_t t, Engine& engine) const override;
  double observation_logdensity(const ParamVector& theta, double y, const State& x, std::size_t t) const override;
  State standardized_process_noise(const ParamVector& theta, const State& next, const State& x, double input,
                                   std::size_t t) const override;

 private:
  WaterTankConfig config_;
};

/// Simulates the tanks for the given input sequence, keeping the latent levels.
SimulatedStateSpace watertank_simulate(const WaterTankModel& model, const ParamVector& theta,
                                       std::span<const double> inputs, const RngStream& rng);

/// -ln p(y | theta) estimated with a bootstrap particle filter.
double watertank_surprisal(const WaterTankModel& model, const ParamVector& theta, const Trajectory& y,
                           std::size_t num_particles, const RngStream& rng);

/// Nominal ("physically reasonable") parameter values on the default scale
/// (levels and pump voltage in [0, 10], 4 s sampling).
WaterTankParams watertank_nominal_params();

/// Independent log-normal priors centred on the nominal values, unit
/// log-variance.
std::vector<ParamPrior> watertank_priors(const WaterTankModel& model);

/// Prior draw truncated to +-`box_halfwidth` log-units around the nominal values.
ParamVector watertank_draw_reasonable(const WaterTankModel& model, const RngStream& rng,
                                      double box_halfwidth = 0.5);

/// Pump voltage excitation: a random-phase multisine around 5 V, clipped to [0, 10].
std::vector<double> watertank_excitation(std::size_t length, const RngStream& rng);

}  // namespace itmc
