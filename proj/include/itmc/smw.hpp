#pragma once

#include <span>

#include "itmc/model.hpp"
#include "itmc/pg_chain.hpp"
#include "itmc/rng.hpp"
#include "itmc/state_space.hpp"

namespace itmc {

struct ZTestResult {
  double z = 0.0;
  double p_value = 1.0;
};

/// Two-sided z-test of zero mean for standardized (unit-variance) noise.
ZTestResult noise_z_test(std::span<const double> standardized_noise);

struct SmwResult {
  ZTestResult test;
  ParamVector theta;
  std::size_t noise_samples = 0;
};

/// Residual check on the smoothed latent trajectory: run the parameter
/// chain, take one parameter draw, draw one state trajectory from
/// p(x | theta, y) by PGAS, recover the implied process noise, and z-test its
/// mean against the model's noise variance.
SmwResult smw_check(const StateSpaceModel& model, const Trajectory& y, std::span<const ParamPrior> priors,
                    const ChainConfig& chain, const RngStream& rng);

}  // namespace itmc
