#pragma once

#include <cstddef>
#include <span>

#include "itmc/rng.hpp"

namespace itmc {

/// One draw from N(mean, variance). A zero variance returns `mean` exactly
/// without consuming randomness.
double gaussian_sample(double mean, double variance, Engine& engine);

double standard_normal(Engine& engine);

/// Mean-centred lag-k autocorrelation normalized by the total sum of squares,
/// so the result lies in [-1, 1]. k = 0 yields 1.
double sample_autocorrelation(std::span<const double> x, std::size_t lag);

/// P(chi^2_dof >= q) through the regularized upper incomplete gamma function.
double chi_square_sf(double q, unsigned dof);

/// Q(a, x) = Gamma(a, x) / Gamma(a), a > 0, x >= 0.
double regularized_gamma_q(double a, double x);

/// P(Z >= z) for a standard normal Z.
double normal_sf(double z);

double normal_logpdf(double x, double mean, double variance);

struct TailFractions {
  double frac_ge = 0.0;
  double frac_le = 0.0;
};

/// Fractions of samples at or above / at or below `reference`. Ties count on
/// both sides.
TailFractions empirical_tail_fractions(std::span<const double> samples, double reference);

/// Kolmogorov-Smirnov sup distance between the ECDF of `samples` and U(0, 1).
double ks_distance_uniform(std::span<const double> samples);

/// log(sum(exp(v))) evaluated without overflow; -inf for an all -inf input.
double log_sum_exp(std::span<const double> values);

double mean(std::span<const double> x);

/// Unbiased (n - 1) sample variance.
double sample_variance(std::span<const double> x);

}  // namespace itmc
