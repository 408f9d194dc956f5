#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "itmc/model.hpp"
#include "itmc/rng.hpp"

namespace itmc {

// Autoregressive model classes. All pre-sample values y_0, y_{-1}, ... are
// fixed at zero, both when simulating and when evaluating likelihoods.

/// y_t = sum_k coeffs[k] * y_{t-1-k} + e_t, e_t ~ N(0, sigma2). sigma2 = 0 is
/// allowed and yields the noiseless orbit.
Trajectory ar_simulate(std::span<const double> coeffs, double sigma2, std::size_t length,
                       const RngStream& rng);

/// -ln p(y | coeffs, sigma2) under the zero-history convention.
double ar_surprisal(std::span<const double> coeffs, double sigma2, const Trajectory& y);

/// e_t = y_t - sum_k coeffs[k] * y_{t-1-k}, t = 1..T.
std::vector<double> prediction_errors(const Trajectory& y, std::span<const double> coeffs);

/// Conditional least-squares (= conditional ML for known variance) AR(p)
/// coefficients. Regression targets start at index `first_target`; the
/// regressors of earlier targets use the zero pre-sample values.
ParamVector ml_estimate_ar(const Trajectory& y, std::size_t order, std::size_t first_target = 0);

struct GaussianPosterior {
  double mean = 0.0;
  double variance = 1.0;
};

/// Exact Gaussian posterior of the AR(1) coefficient for known noise
/// variance and prior N(prior_mean, prior_var). A very large prior_var gives
/// the flat-prior (likelihood-concentrated) weights.
GaussianPosterior ar1_posterior(const Trajectory& y, double prior_mean, double prior_var, double sigma2);

class Ar1PosteriorSampler final : public PosteriorSampler {
 public:
  Ar1PosteriorSampler(const Trajectory& y, double prior_mean, double prior_var, double sigma2);

  PosteriorDraws draw(std::size_t n, const RngStream& rng) const override;

  const GaussianPosterior& posterior() const { return posterior_; }

 private:
  GaussianPosterior posterior_;
};

/// AR(p) model class with fixed, known noise variance; theta holds the p
/// coefficients.
class ArModel final : public GenerativeModel {
 public:
  ArModel(std::size_t order, double sigma2);

  std::size_t param_dim() const override { return order_; }
  double noise_variance() const { return sigma2_; }

  Trajectory simulate(const ParamVector& theta, std::span<const double> inputs, std::size_t length,
                      const RngStream& rng) const override;
  double surprisal(const ParamVector& theta, const Trajectory& y, const RngStream& rng) const override;

 private:
  std::size_t order_;
  double sigma2_;
};

/// Synthetic data-generating processes used to exercise the AR(1) class.
///   I   AR(1), 0.7, unit noise (well specified)
///   II  saturated AR(1): y_t = max(0.7 y_{t-1} + e_t, -0.3)
///   III AR(2): y_t = -0.3 y_{t-1} + 0.5 y_{t-2} + e_t
///   IV  AR(1), 0.7, noise variance 0.1 (class assumes 1)
///   V   AR(1), 0.7, unit noise (class assumes 0.1)
enum class SyntheticCase { I, II, III, IV, V };

/// Accepts "i".."v" or "case-i".."case-v" (case-insensitive).
SyntheticCase parse_case(std::string_view name);
std::string_view case_name(SyntheticCase c);

Trajectory generate_case(SyntheticCase c, std::size_t length, const RngStream& rng);

/// Noise variance assumed by the AR(1) model class when checking case `c`.
double model_class_variance(SyntheticCase c);

}  // namespace itmc
