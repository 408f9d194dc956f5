#include "itmc/particle.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "itmc/errors.hpp"
#include "itmc/stats.hpp"

namespace itmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Normalizes log-weights in place into `weights`; returns log of their sum.
double normalize(std::span<const double> log_weights, std::vector<double>& weights) {
  const double lse = log_sum_exp(log_weights);
  weights.resize(log_weights.size());
  if (!std::isfinite(lse)) return lse;
  for (std::size_t i = 0; i < log_weights.size(); ++i) weights[i] = std::exp(log_weights[i] - lse);
  return lse;
}

std::size_t sample_index(std::span<const double> weights, Engine& engine) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(engine);
  double cum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cum += weights[i];
    if (u < cum) return i;
  }
  // Rounding left u above the cumulative sum; take the last positive weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

void check_filter_args(const Trajectory& y, std::size_t num_particles) {
  if (num_particles < 2) throw InvalidArgument("particle filter needs at least two particles");
  if (y.size() == 0) throw InvalidArgument("particle filter needs a nonempty record");
}

}  // namespace

void multinomial_resample(std::span<const double> weights, std::size_t count, Engine& engine,
                          std::vector<std::size_t>& out) {
  // Sorted uniforms from normalized exponential spacings, merged against the CDF.
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> spacings(count + 1);
  double total = 0.0;
  for (double& s : spacings) {
    s = expo(engine);
    total += s;
  }
  out.resize(count);
  std::size_t i = 0;
  double cdf = weights.empty() ? 0.0 : weights[0];
  double u = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    u += spacings[k] / total;
    while (u >= cdf && i + 1 < weights.size()) cdf += weights[++i];
    out[k] = i;
  }
}

FilterResult bootstrap_pf(const StateSpaceModel& model, const ParamVector& theta, const Trajectory& y,
                          std::size_t num_particles, const RngStream& rng) {
  check_filter_args(y, num_particles);
  const std::size_t n = num_particles;
  const double log_n = std::log(static_cast<double>(n));
  Engine engine = rng.engine();

  std::vector<State> particles(n);
  std::vector<State> scratch(n);
  std::vector<double> log_w(n);
  std::vector<double> w;
  std::vector<std::size_t> ancestors;
  double loglik = 0.0;

  for (std::size_t t = 0; t < y.size(); ++t) {
    if (t == 0) {
      for (auto& x : particles) x = model.sample_initial_state(theta, engine);
    } else {
      multinomial_resample(w, n, engine, ancestors);
      const double u = input_at(y, t - 1);
      for (std::size_t i = 0; i < n; ++i) scratch[i] = model.sample_transition(theta, particles[ancestors[i]], u, t - 1, engine);
      particles.swap(scratch);
    }
    for (std::size_t i = 0; i < n; ++i) log_w[i] = model.observation_logdensity(theta, y.observations[t], particles[i], t);
    const double lse = normalize(log_w, w);
    if (!std::isfinite(lse)) throw ParticleDegeneracy(t, "bootstrap_pf: all particle weights are zero");
    loglik += lse - log_n;
  }
  return {loglik, {std::move(particles), std::move(log_w)}};
}

std::vector<State> pgas_update(const StateSpaceModel& model, const ParamVector& theta, const Trajectory& y,
                               std::span<const State> reference, std::size_t num_particles,
                               const RngStream& rng) {
  check_filter_args(y, num_particles);
  const bool conditional = !reference.empty();
  if (conditional && reference.size() != y.size()) throw InvalidArgument("pgas_update: reference length mismatch");

  const std::size_t len = y.size();
  const std::size_t n = num_particles;
  const std::size_t free = conditional ? n - 1 : n;
  Engine engine = rng.engine();

  // Row-major [t][i] storage of the whole particle history.
  std::vector<State> particles(len * n);
  std::vector<std::size_t> ancestry(len * n, 0);
  std::vector<double> log_w(n);
  std::vector<double> w;
  std::vector<double> as_log_w(n);
  std::vector<double> as_w;
  std::vector<std::size_t> resampled;

  for (std::size_t t = 0; t < len; ++t) {
    State* row = &particles[t * n];
    if (t == 0) {
      for (std::size_t i = 0; i < free; ++i) row[i] = model.sample_initial_state(theta, engine);
      if (conditional) {
        row[n - 1] = reference[0];
        if (!std::isfinite(model.initial_logdensity(theta, reference[0]))) {
          throw ParticleDegeneracy(0, "pgas_update: reference has zero initial density");
        }
      }
    } else {
      const State* prev = &particles[(t - 1) * n];
      const double u = input_at(y, t - 1);
      multinomial_resample(w, free, engine, resampled);
      for (std::size_t i = 0; i < free; ++i) {
        ancestry[t * n + i] = resampled[i];
        row[i] = model.sample_transition(theta, prev[resampled[i]], u, t - 1, engine);
      }
      if (conditional) {
        row[n - 1] = reference[t];
        for (std::size_t j = 0; j < n; ++j) {
          as_log_w[j] = log_w[j] + model.transition_logdensity(theta, reference[t], prev[j], u, t - 1);
        }
        if (!std::isfinite(normalize(as_log_w, as_w))) {
          throw ParticleDegeneracy(t, "pgas_update: reference has zero transition density from every particle");
        }
        ancestry[t * n + n - 1] = sample_index(as_w, engine);
      }
    }
    for (std::size_t i = 0; i < n; ++i) log_w[i] = model.observation_logdensity(theta, y.observations[t], row[i], t);
    if (!std::isfinite(normalize(log_w, w))) throw ParticleDegeneracy(t, "pgas_update: all particle weights are zero");
  }

  std::vector<State> out(len);
  std::size_t k = sample_index(w, engine);
  for (std::size_t t = len; t-- > 0;) {
    out[t] = particles[t * n + k];
    k = ancestry[t * n + k];
  }
  return out;
}

}  // namespace itmc
