#include "itmc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "itmc/errors.hpp"

namespace itmc {

double gaussian_sample(double mean, double variance, Engine& engine) {
  if (!(variance >= 0.0)) throw InvalidArgument("gaussian_sample: variance must be nonnegative");
  if (variance == 0.0) return mean;
  return mean + std::sqrt(variance) * standard_normal(engine);
}

double standard_normal(Engine& engine) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine);
}

double sample_autocorrelation(std::span<const double> x, std::size_t lag) {
  const std::size_t n = x.size();
  if (n == 0 || lag >= n) throw InvalidArgument("sample_autocorrelation: lag must be below the sequence length");
  const double xbar = mean(x);
  double denom = 0.0;
  for (double v : x) denom += (v - xbar) * (v - xbar);
  if (denom == 0.0) throw DegenerateInput("sample_autocorrelation: sequence has zero variance");
  double num = 0.0;
  for (std::size_t t = lag; t < n; ++t) num += (x[t] - xbar) * (x[t - lag] - xbar);
  return num / denom;
}

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) throw InvalidArgument("regularized_gamma_q: need a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_continued_fraction(a, x);
}

double chi_square_sf(double q, unsigned dof) {
  if (dof == 0) throw InvalidArgument("chi_square_sf: degrees of freedom must be positive");
  if (!(q >= 0.0)) throw InvalidArgument("chi_square_sf: statistic must be nonnegative");
  return regularized_gamma_q(0.5 * dof, 0.5 * q);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double normal_logpdf(double x, double mean, double variance) {
  const double r = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + r * r / variance);
}

TailFractions empirical_tail_fractions(std::span<const double> samples, double reference) {
  if (samples.empty()) throw InvalidArgument("empirical_tail_fractions: empty sample set");
  std::size_t ge = 0;
  std::size_t le = 0;
  for (double s : samples) {
    if (s >= reference) ++ge;
    if (s <= reference) ++le;
  }
  const double m = static_cast<double>(samples.size());
  return {static_cast<double>(ge) / m, static_cast<double>(le) / m};
}

double ks_distance_uniform(std::span<const double> samples) {
  if (samples.empty()) throw InvalidArgument("ks_distance_uniform: empty sample set");
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double s : sorted) {
    if (!(s >= 0.0 && s <= 1.0)) throw InvalidArgument("ks_distance_uniform: sample outside [0, 1]");
  }
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double above = static_cast<double>(i + 1) / n - sorted[i];
    const double below = sorted[i] - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return d;
}

double log_sum_exp(std::span<const double> values) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : values) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

double mean(std::span<const double> x) {
  if (x.empty()) throw InvalidArgument("mean: empty sequence");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) throw InvalidArgument("sample_variance: need at least two values");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

}  // namespace itmc
