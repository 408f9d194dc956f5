#include "itmc/water_tank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "itmc/errors.hpp"
#include "itmc/particle.hpp"
#include "itmc/stats.hpp"

namespace itmc {

namespace {

double log_normal_cdf(double z) {
  if (z > -30.0) return std::log(0.5 * std::erfc(-z / std::numbers::sqrt2));
  const double z2 = z * z;
  return -0.5 * z2 - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log1p(-1.0 / z2 + 3.0 / (z2 * z2));
}

// Density of clamp(N(mean, var), 0, cap) at x, against Lebesgue measure on
// (0, cap) plus unit atoms at both bounds.
double censored_logdensity(double x, double mean, double var, double cap) {
  if (var == 0.0) return x == std::clamp(mean, 0.0, cap) ? 0.0 : -std::numeric_limits<double>::infinity();
  const double sd = std::sqrt(var);
  if (x <= 0.0) return log_normal_cdf(-mean / sd);
  if (x >= cap) return log_normal_cdf((mean - cap) / sd);
  return normal_logpdf(x, mean, var);
}

}  // namespace

WaterTankModel::WaterTankModel(WaterTankConfig config) : config_(config) {
  if (!(config_.dt > 0.0)) throw InvalidArgument("WaterTankModel: sampling interval must be positive");
  if (!(config_.capacity_upper > 0.0) || !(config_.capacity_lower > 0.0)) {
    throw InvalidArgument("WaterTankModel: capacities must be positive");
  }
  if (!(config_.initial_var[0] >= 0.0) || !(config_.initial_var[1] >= 0.0)) {
    throw InvalidArgument("WaterTankModel: initial variances must be nonnegative");
  }
}

std::size_t WaterTankModel::param_dim() const { return config_.variant == WaterTankVariant::Extended ? 8 : 6; }

WaterTankParams WaterTankModel::unpack(const ParamVector& theta) const {
  if (theta.size() != param_dim()) throw InvalidArgument("WaterTankModel: parameter dimension mismatch");
  WaterTankParams p;
  p.k1 = theta[0];
  p.k2 = theta[1];
  p.k3 = theta[2];
  std::size_t next = 3;
  if (config_.variant == WaterTankVariant::Extended) {
    p.k4 = theta[3];
    p.k5 = theta[4];
    next = 5;
  }
  p.var_w1 = theta[next];
  p.var_w2 = theta[next + 1];
  p.var_obs = theta[next + 2];
  const bool rates_ok = p.k1 > 0.0 && p.k2 > 0.0 && p.k3 > 0.0 &&
                        (config_.variant == WaterTankVariant::Original || (p.k4 > 0.0 && p.k5 > 0.0));
  if (!rates_ok) throw InvalidArgument("WaterTankModel: rate constants must be positive");
  if (!(p.var_w1 >= 0.0) || !(p.var_w2 >= 0.0) || !(p.var_obs >= 0.0)) {
    throw InvalidArgument("WaterTankModel: noise variances must be nonnegative");
  }
  return p;
}

ParamVector WaterTankModel::pack(const WaterTankParams& p) const {
  if (config_.variant == WaterTankVariant::Extended) {
    return ParamVector{p.k1, p.k2, p.k3, p.k4, p.k5, p.var_w1, p.var_w2, p.var_obs};
  }
  return ParamVector{p.k1, p.k2, p.k3, p.var_w1, p.var_w2, p.var_obs};
}

State WaterTankModel::drift(const WaterTankParams& p, const State& x, double input) const {
  const double dt = config_.dt;
  const double out1 = p.k1 * std::sqrt(std::max(x[0], 0.0)) + p.k4 * x[0];
  const double m1 = x[0] + dt * (-out1 + p.k2 * input);
  const double overflow = std::max(m1 - config_.capacity_upper, 0.0);
  const double m2 = x[1] + dt * (out1 - p.k3 * std::sqrt(std::max(x[1], 0.0)) - p.k5 * x[1]) + overflow;
  return {m1, m2};
}

State WaterTankModel::sample_initial_state(const ParamVector&, Engine& engine) const {
  return {std::clamp(gaussian_sample(config_.initial_mean[0], config_.initial_var[0], engine), 0.0,
                     config_.capacity_upper),
          std::clamp(gaussian_sample(config_.initial_mean[1], config_.initial_var[1], engine), 0.0,
                     config_.capacity_lower)};
}

double WaterTankModel::initial_logdensity(const ParamVector&, const State& x) const {
  return censored_logdensity(x[0], config_.initial_mean[0], config_.initial_var[0], config_.capacity_upper) +
         censored_logdensity(x[1], config_.initial_mean[1], config_.initial_var[1], config_.capacity_lower);
}

State WaterTankModel::sample_transition(const ParamVector& theta, const State& x, double input, std::size_t,
                                        Engine& engine) const {
  const WaterTankParams p = unpack(theta);
  const State m = drift(p, x, input);
  return {std::clamp(gaussian_sample(m[0], config_.dt * p.var_w1, engine), 0.0, config_.capacity_upper),
          std::clamp(gaussian_sample(m[1], config_.dt * p.var_w2, engine), 0.0, config_.capacity_lower)};
}

double WaterTankModel::transition_logdensity(const ParamVector& theta, const State& next, const State& x,
                                             double input, std::size_t) const {
  const WaterTankParams p = unpack(theta);
  const State m = drift(p, x, input);
  return censored_logdensity(next[0], m[0], config_.dt * p.var_w1, config_.capacity_upper) +
         censored_logdensity(next[1], m[1], config_.dt * p.var_w2, config_.capacity_lower);
}

double WaterTankModel::sample_observation(const ParamVector& theta, const State& x, std::size_t,
                                          Engine& engine) const {
  return gaussian_sample(x[1], unpack(theta).var_obs, engine);
}

double WaterTankModel::observation_logdensity(const ParamVector& theta, double y, const State& x,
                                              std::size_t) const {
  const double var = unpack(theta).var_obs;
  if (var == 0.0) return y == x[1] ? 0.0 : -std::numeric_limits<double>::infinity();
  return normal_logpdf(y, x[1], var);
}

State WaterTankModel::standardized_process_noise(const ParamVector& theta, const State& next, const State& x,
                                                 double input, std::size_t) const {
  const WaterTankParams p = unpack(theta);
  const State m = drift(p, x, input);
  return {(next[0] - m[0]) / std::sqrt(config_.dt * p.var_w1), (next[1] - m[1]) / std::sqrt(config_.dt * p.var_w2)};
}

SimulatedStateSpace watertank_simulate(const WaterTankModel& model, const ParamVector& theta,
                                       std::span<const double> inputs, const RngStream& rng) {
  if (inputs.empty()) throw InvalidArgument("watertank_simulate: input sequence must be nonempty");
  model.unpack(theta);
  return simulate_state_space(model, theta, inputs, inputs.size(), rng);
}

double watertank_surprisal(const WaterTankModel& model, const ParamVector& theta, const Trajectory& y,
                           std::size_t num_particles, const RngStream& rng) {
  return -bootstrap_pf(model, theta, y, num_particles, rng).log_likelihood;
}

WaterTankParams watertank_nominal_params() {
  WaterTankParams p;
  p.k1 = 0.05;
  p.k2 = 0.04;
  p.k3 = 0.05;
  p.k4 = 0.01;
  p.k5 = 0.01;
  p.var_w1 = 0.005;
  p.var_w2 = 0.005;
  p.var_obs = 0.01;
  return p;
}

std::vector<ParamPrior> watertank_priors(const WaterTankModel& model) {
  const ParamVector nominal = model.pack(watertank_nominal_params());
  std::vector<ParamPrior> priors;
  for (double v : nominal.values()) priors.push_back(ParamPrior::log_normal(std::log(v), 1.0));
  return priors;
}

ParamVector watertank_draw_reasonable(const WaterTankModel& model, const RngStream& rng, double box_halfwidth) {
  if (!(box_halfwidth > 0.0)) throw InvalidArgument("watertank_draw_reasonable: box must be nonempty");
  Engine engine = rng.engine();
  const auto priors = watertank_priors(model);
  std::vector<double> values;
  for (const auto& prior : priors) {
    double offset = 0.0;
    do {
      offset = gaussian_sample(0.0, prior.variance, engine);
    } while (std::abs(offset) > box_halfwidth);
    values.push_back(std::exp(prior.location + offset));
  }
  return ParamVector(std::move(values));
}

std::vector<double> watertank_excitation(std::size_t length, const RngStream& rng) {
  constexpr int kHarmonics = 8;
  constexpr double kBasePeriod = 256.0;
  Engine engine = rng.engine();
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  double phases[kHarmonics];
  for (double& p : phases) p = phase(engine);
  std::vector<double> u(length);
  for (std::size_t t = 0; t < length; ++t) {
    double v = 5.0;
    for (int k = 0; k < kHarmonics; ++k) {
      v += 0.8 * std::sin(2.0 * std::numbers::pi * (k + 1) * static_cast<double>(t) / kBasePeriod + phases[k]);
    }
    u[t] = std::clamp(v, 0.0, 10.0);
  }
  return u;
}

}  // namespace itmc
