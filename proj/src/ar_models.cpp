#include "itmc/ar_models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "itmc/errors.hpp"
#include "itmc/stats.hpp"

namespace itmc {

namespace {

double ar_mean(std::span<const double> coeffs, std::span<const double> y, std::size_t t) {
  double m = 0.0;
  for (std::size_t k = 0; k < coeffs.size() && k < t; ++k) m += coeffs[k] * y[t - 1 - k];
  return m;
}

void require_length(std::size_t length) {
  if (length == 0) throw InvalidArgument("trajectory length must be at least 1");
}

}  // namespace

Trajectory ar_simulate(std::span<const double> coeffs, double sigma2, std::size_t length,
                       const RngStream& rng) {
  require_length(length);
  if (coeffs.empty()) throw InvalidArgument("ar_simulate: order must be at least 1");
  if (!(sigma2 >= 0.0)) throw InvalidArgument("ar_simulate: noise variance must be nonnegative");
  Engine engine = rng.engine();
  Trajectory out;
  out.observations.resize(length);
  auto& y = out.observations;
  for (std::size_t t = 0; t < length; ++t) y[t] = gaussian_sample(ar_mean(coeffs, y, t), sigma2, engine);
  return out;
}

double ar_surprisal(std::span<const double> coeffs, double sigma2, const Trajectory& y) {
  require_length(y.size());
  if (!(sigma2 > 0.0)) throw InvalidArgument("ar_surprisal: noise variance must be positive");
  const auto& obs = y.observations;
  double ss = 0.0;
  for (std::size_t t = 0; t < obs.size(); ++t) {
    const double e = obs[t] - ar_mean(coeffs, obs, t);
    ss += e * e;
  }
  const double n = static_cast<double>(obs.size());
  return 0.5 * n * std::log(2.0 * std::numbers::pi * sigma2) + ss / (2.0 * sigma2);
}

std::vector<double> prediction_errors(const Trajectory& y, std::span<const double> coeffs) {
  require_length(y.size());
  const auto& obs = y.observations;
  std::vector<double> e(obs.size());
  for (std::size_t t = 0; t < obs.size(); ++t) e[t] = obs[t] - ar_mean(coeffs, obs, t);
  return e;
}

ParamVector ml_estimate_ar(const Trajectory& y, std::size_t order, std::size_t first_target) {
  if (order == 0) throw InvalidArgument("ml_estimate_ar: order must be at least 1");
  const auto& obs = y.observations;
  if (obs.size() <= order || first_target >= obs.size() || obs.size() - first_target < order) {
    throw InvalidArgument("ml_estimate_ar: record too short for the requested order");
  }
  const auto rows = static_cast<Eigen::Index>(obs.size() - first_target);
  const auto cols = static_cast<Eigen::Index>(order);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::VectorXd target(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t t = first_target + static_cast<std::size_t>(r);
    target(r) = obs[t];
    for (std::size_t k = 0; k < order && k < t; ++k) X(r, static_cast<Eigen::Index>(k)) = obs[t - 1 - k];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-12);
  if (qr.rank() < cols) throw DegenerateInput("ml_estimate_ar: regressor matrix is rank deficient");
  const Eigen::VectorXd coeffs = qr.solve(target);
  return ParamVector(std::vector<double>(coeffs.data(), coeffs.data() + coeffs.size()));
}

GaussianPosterior ar1_posterior(const Trajectory& y, double prior_mean, double prior_var, double sigma2) {
  require_length(y.size());
  if (!(prior_var > 0.0) || !(sigma2 > 0.0)) throw InvalidArgument("ar1_posterior: variances must be positive");
  const auto& obs = y.observations;
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::size_t t = 1; t < obs.size(); ++t) {
    s1 += obs[t] * obs[t - 1];
    s2 += obs[t - 1] * obs[t - 1];
  }
  GaussianPosterior post;
  post.variance = 1.0 / (1.0 / prior_var + s2 / sigma2);
  post.mean = post.variance * (prior_mean / prior_var + s1 / sigma2);
  return post;
}

Ar1PosteriorSampler::Ar1PosteriorSampler(const Trajectory& y, double prior_mean, double prior_var, double sigma2)
    : posterior_(ar1_posterior(y, prior_mean, prior_var, sigma2)) {}

PosteriorDraws Ar1PosteriorSampler::draw(std::size_t n, const RngStream& rng) const {
  if (n == 0) throw InvalidArgument("Ar1PosteriorSampler::draw: n must be positive");
  Engine engine = rng.engine();
  std::vector<ParamVector> draws;
  draws.reserve(n);
  for (std::size_t i = 0; i < n; ++i) draws.push_back(ParamVector{gaussian_sample(posterior_.mean, posterior_.variance, engine)});
  return PosteriorDraws(std::move(draws));
}

ArModel::ArModel(std::size_t order, double sigma2) : order_(order), sigma2_(sigma2) {
  if (order == 0) throw InvalidArgument("ArModel: order must be at least 1");
  if (!(sigma2 > 0.0)) throw InvalidArgument("ArModel: noise variance must be positive");
}

Trajectory ArModel::simulate(const ParamVector& theta, std::span<const double> inputs, std::size_t length,
                             const RngStream& rng) const {
  if (theta.size() != order_) throw InvalidArgument("ArModel: parameter dimension mismatch");
  Trajectory out = ar_simulate(theta.values(), sigma2_, length, rng);
  out.inputs.assign(inputs.begin(), inputs.end());
  return out;
}

double ArModel::surprisal(const ParamVector& theta, const Trajectory& y, const RngStream&) const {
  if (theta.size() != order_) throw InvalidArgument("ArModel: parameter dimension mismatch");
  return ar_surprisal(theta.values(), sigma2_, y);
}

SyntheticCase parse_case(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s.starts_with("case-")) s = s.substr(5);
  if (s == "i") return SyntheticCase::I;
  if (s == "ii") return SyntheticCase::II;
  if (s == "iii") return SyntheticCase::III;
  if (s == "iv") return SyntheticCase::IV;
  if (s == "v") return SyntheticCase::V;
  throw InvalidArgument("unknown synthetic case '" + std::string(name) + "'");
}

std::string_view case_name(SyntheticCase c) {
  switch (c) {
    case SyntheticCase::I: return "case-i";
    case SyntheticCase::II: return "case-ii";
    case SyntheticCase::III: return "case-iii";
    case SyntheticCase::IV: return "case-iv";
    case SyntheticCase::V: return "case-v";
  }
  throw InvalidArgument("unknown synthetic case");
}

Trajectory generate_case(SyntheticCase c, std::size_t length, const RngStream& rng) {
  require_length(length);
  switch (c) {
    case SyntheticCase::I:
    case SyntheticCase::V: {
      const double coeffs[] = {0.7};
      return ar_simulate(coeffs, 1.0, length, rng);
    }
    case SyntheticCase::IV: {
      const double coeffs[] = {0.7};
      return ar_simulate(coeffs, 0.1, length, rng);
    }
    case SyntheticCase::III: {
      const double coeffs[] = {-0.3, 0.5};
      return ar_simulate(coeffs, 1.0, length, rng);
    }
    case SyntheticCase::II: {
      Engine engine = rng.engine();
      Trajectory out;
      out.observations.resize(length);
      double prev = 0.0;
      for (auto& y : out.observations) {
        y = std::max(0.7 * prev + standard_normal(engine), -0.3);
        prev = y;
      }
      return out;
    }
  }
  throw InvalidArgument("generate_case: unknown case");
}

double model_class_variance(SyntheticCase c) { return c == SyntheticCase::V ? 0.1 : 1.0; }

}  // namespace itmc
