#include "itmc/pg_chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "itmc/errors.hpp"
#include "itmc/particle.hpp"
#include "itmc/stats.hpp"

namespace itmc {

double ParamPrior::logdensity(double value) const {
  if (kind == Kind::Normal) return normal_logpdf(value, location, variance);
  if (!(value > 0.0)) return -std::numeric_limits<double>::infinity();
  const double lv = std::log(value);
  return normal_logpdf(lv, location, variance) - lv;
}

double ParamPrior::center() const { return kind == Kind::Normal ? location : std::exp(location); }

namespace {

double to_internal(const ParamPrior& prior, double value) {
  return prior.kind == ParamPrior::Kind::LogNormal ? std::log(value) : value;
}

double from_internal(const ParamPrior& prior, double z) {
  return prior.kind == ParamPrior::Kind::LogNormal ? std::exp(z) : z;
}

// Log target for theta given states: joint density plus prior, expressed on
// the internal (log for positive parameters) scale, hence the Jacobian term.
double log_target(const StateSpaceModel& model, std::span<const ParamPrior> priors, const std::vector<double>& z,
                  std::span<const State> states, const Trajectory& y) {
  std::vector<double> raw(z.size());
  double lp = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    raw[k] = from_internal(priors[k], z[k]);
    if (!std::isfinite(raw[k])) return -std::numeric_limits<double>::infinity();
    lp += priors[k].logdensity(raw[k]);
    if (priors[k].kind == ParamPrior::Kind::LogNormal) lp += z[k];
  }
  if (!std::isfinite(lp)) return lp;
  const double lj = log_joint_density(model, ParamVector(std::move(raw)), states, y);
  return std::isnan(lj) ? -std::numeric_limits<double>::infinity() : lp + lj;
}

ParamVector to_params(std::span<const ParamPrior> priors, const std::vector<double>& z) {
  std::vector<double> raw(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) raw[k] = from_internal(priors[k], z[k]);
  return ParamVector(std::move(raw));
}

}  // namespace

ChainResult pg_parameter_chain(const StateSpaceModel& model, const Trajectory& y,
                               std::span<const ParamPrior> priors, const ChainConfig& config,
                               const RngStream& rng) {
  validate_trajectory(y);
  const std::size_t d = model.param_dim();
  if (priors.size() != d) throw InvalidArgument("pg_parameter_chain: one prior per parameter required");
  if (config.iterations == 0) throw InvalidArgument("pg_parameter_chain: iterations must be positive");
  if (config.burn_in >= config.iterations) throw InvalidArgument("pg_parameter_chain: burn-in must leave at least one sweep");
  if (config.thin == 0) throw InvalidArgument("pg_parameter_chain: thin must be positive");

  std::vector<double> z(d);
  if (config.initial_theta) {
    if (config.initial_theta->size() != d) throw InvalidArgument("pg_parameter_chain: initial theta has wrong dimension");
    for (std::size_t k = 0; k < d; ++k) z[k] = to_internal(priors[k], (*config.initial_theta)[k]);
  } else {
    for (std::size_t k = 0; k < d; ++k) z[k] = to_internal(priors[k], priors[k].center());
  }
  for (double v : z) {
    if (!std::isfinite(v)) throw InvalidArgument("pg_parameter_chain: initial theta outside the prior support");
  }

  ParamVector theta = to_params(priors, z);
  std::vector<State> states = pgas_update(model, theta, y, {}, config.num_particles, rng.substream(0));
  double current = log_target(model, priors, z, states, y);
  if (!std::isfinite(current)) throw InvalidArgument("pg_parameter_chain: joint density is not finite at initialization");

  Engine engine = rng.substream(1).engine();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  constexpr std::size_t kBatch = 25;
  constexpr double kTargetAcceptance = 0.3;
  constexpr double kBlockTargetAcceptance = 0.25;

  std::vector<double> log_step(d, std::log(config.initial_step));
  std::vector<std::size_t> batch_accepts(d, 0);
  std::size_t batch_len = 0;
  std::size_t batch_index = 0;

  // Joint moves: history collected from a quarter into burn-in, proposals
  // start once it holds enough sweeps, covariance frozen after burn-in.
  const std::size_t history_start = config.burn_in / 4;
  const std::size_t block_start = history_start + std::max<std::size_t>(100, 10 * d);
  const bool use_block = config.block_updates && block_start < config.burn_in;
  const auto dim = static_cast<Eigen::Index>(d);
  Eigen::VectorXd hist_mean = Eigen::VectorXd::Zero(dim);
  Eigen::MatrixXd hist_scatter = Eigen::MatrixXd::Zero(dim, dim);
  std::size_t hist_count = 0;
  Eigen::MatrixXd block_chol;
  double block_log_scale = std::log(2.38 / std::sqrt(static_cast<double>(d)));
  std::size_t block_batch_accepts = 0;
  std::size_t block_batch_proposals = 0;

  std::size_t accepted = 0;
  std::size_t proposed = 0;
  std::vector<ParamVector> draws;

  auto metropolis = [&](std::vector<double> proposal) {
    const double candidate = log_target(model, priors, proposal, states, y);
    const bool accept = std::isfinite(candidate) && std::log(unif(engine)) < candidate - current;
    if (accept) {
      z = std::move(proposal);
      current = candidate;
    }
    return accept;
  };

  auto refresh_block_factor = [&] {
    Eigen::MatrixXd cov = hist_scatter / static_cast<double>(hist_count - 1);
    cov.diagonal().array() += 1e-10;
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) block_chol = llt.matrixL();
  };

  for (std::size_t it = 0; it < config.iterations; ++it) {
    states = pgas_update(model, theta, y, states, config.num_particles, rng.substream(2 + it));
    current = log_target(model, priors, z, states, y);
    const bool in_burn_in = it < config.burn_in;
    const bool block_active = use_block && it >= block_start && block_chol.size() > 0;

    for (std::size_t sweep = 0; sweep < config.theta_sweeps; ++sweep) {
      for (std::size_t k = 0; k < d; ++k) {
        std::vector<double> proposal = z;
        proposal[k] += std::exp(log_step[k]) * standard_normal(engine);
        const bool accept = metropolis(std::move(proposal));
        if (in_burn_in) {
          batch_accepts[k] += accept ? 1 : 0;
        } else {
          accepted += accept ? 1 : 0;
          ++proposed;
        }
      }
      if (block_active) {
        Eigen::VectorXd xi(dim);
        for (Eigen::Index k = 0; k < dim; ++k) xi(k) = standard_normal(engine);
        const Eigen::VectorXd step = std::exp(block_log_scale) * (block_chol * xi);
        std::vector<double> proposal = z;
        for (std::size_t k = 0; k < d; ++k) proposal[k] += step(static_cast<Eigen::Index>(k));
        const bool accept = metropolis(std::move(proposal));
        if (in_burn_in) {
          block_batch_accepts += accept ? 1 : 0;
          ++block_batch_proposals;
        } else {
          accepted += accept ? 1 : 0;
          ++proposed;
        }
      }
    }
    theta = to_params(priors, z);

    if (use_block && in_burn_in && it >= history_start) {
      const Eigen::Map<const Eigen::VectorXd> zv(z.data(), dim);
      ++hist_count;
      const Eigen::VectorXd delta = zv - hist_mean;
      hist_mean += delta / static_cast<double>(hist_count);
      hist_scatter += delta * (zv - hist_mean).transpose();
      if (it + 1 >= block_start && (it + 1 - block_start) % kBatch == 0) refresh_block_factor();
    }

    if (in_burn_in && ++batch_len == kBatch) {
      ++batch_index;
      const double delta = std::min(0.5, 1.0 / std::sqrt(static_cast<double>(batch_index)));
      const double denom = static_cast<double>(kBatch * config.theta_sweeps);
      for (std::size_t k = 0; k < d; ++k) {
        const double rate = static_cast<double>(batch_accepts[k]) / denom;
        log_step[k] += rate > kTargetAcceptance ? delta : -delta;
        batch_accepts[k] = 0;
      }
      if (block_batch_proposals > 0) {
        const double rate = static_cast<double>(block_batch_accepts) / static_cast<double>(block_batch_proposals);
        block_log_scale += rate > kBlockTargetAcceptance ? delta : -delta;
        block_batch_accepts = 0;
        block_batch_proposals = 0;
      }
      batch_len = 0;
    }

    if (it >= config.burn_in && (it - config.burn_in) % config.thin == 0) draws.push_back(theta);
  }

  ChainResult result{PosteriorDraws(std::move(draws)), 0.0, {}, theta, std::move(states)};
  result.acceptance_rate = proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
  result.step_sizes.resize(d);
  for (std::size_t k = 0; k < d; ++k) result.step_sizes[k] = std::exp(log_step[k]);
  return result;
}

EmpiricalPosteriorSampler::EmpiricalPosteriorSampler(PosteriorDraws draws) : draws_(std::move(draws)) {}

PosteriorDraws EmpiricalPosteriorSampler::draw(std::size_t n, const RngStream& rng) const {
  if (n == 0) throw InvalidArgument("EmpiricalPosteriorSampler::draw: n must be positive");
  const std::size_t stored = draws_.size();
  std::vector<ParamVector> out;
  out.reserve(n);
  if (n <= stored && draws_.equally_weighted()) {
    // Evenly spaced, ending at the last stored draw.
    for (std::size_t i = 0; i < n; ++i) out.push_back(draws_[stored - 1 - (i * stored) / n]);
    return PosteriorDraws(std::move(out));
  }
  Engine engine = rng.engine();
  std::discrete_distribution<std::size_t> pick(draws_.weights().begin(), draws_.weights().end());
  for (std::size_t i = 0; i < n; ++i) out.push_back(draws_[pick(engine)]);
  return PosteriorDraws(std::move(out));
}

}  // namespace itmc
