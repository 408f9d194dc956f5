#include "itmc/smw.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "itmc/errors.hpp"
#include "itmc/particle.hpp"
#include "itmc/stats.hpp"

namespace itmc {

ZTestResult noise_z_test(std::span<const double> standardized_noise) {
  if (standardized_noise.empty()) throw InvalidArgument("noise_z_test: empty noise sequence");
  const double n = static_cast<double>(standardized_noise.size());
  ZTestResult out;
  out.z = mean(standardized_noise) * std::sqrt(n);
  out.p_value = std::min(1.0, 2.0 * normal_sf(std::abs(out.z)));
  return out;
}

SmwResult smw_check(const StateSpaceModel& model, const Trajectory& y, std::span<const ParamPrior> priors,
                    const ChainConfig& chain, const RngStream& rng) {
  if (y.size() < 2) throw InvalidArgument("smw_check: need at least two samples");
  const ChainResult posterior = pg_parameter_chain(model, y, priors, chain, rng.substream(0));

  Engine engine = rng.substream(1).engine();
  std::uniform_int_distribution<std::size_t> pick(0, posterior.draws.size() - 1);
  const ParamVector theta = posterior.draws[pick(engine)];

  // A short run of PGAS sweeps from the chain's final trajectory approximates
  // one exact draw from the smoothing distribution at theta.
  std::vector<State> states = posterior.last_states;
  constexpr std::size_t kSweeps = 10;
  for (std::size_t s = 0; s < kSweeps; ++s) {
    states = pgas_update(model, theta, y, states, chain.num_particles, rng.substream(2 + s));
  }

  std::vector<double> noise;
  noise.reserve((y.size() - 1) * model.state_dim());
  for (std::size_t t = 1; t < y.size(); ++t) {
    const State w = model.standardized_process_noise(theta, states[t], states[t - 1], input_at(y, t - 1), t - 1);
    for (std::size_t k = 0; k < model.state_dim(); ++k) noise.push_back(w[k]);
  }
  return {noise_z_test(noise), theta, noise.size()};
}

}  // namespace itmc
