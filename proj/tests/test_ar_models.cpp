#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "itmc/ar_models.hpp"
#include "itmc/errors.hpp"
#include "itmc/stats.hpp"

using namespace itmc;

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

// Posterior of the AR(1) coefficient tabulated on a uniform grid from
// prior x likelihood, normalized by the trapezoid rule.
struct GridPosterior {
  std::vector<double> theta;
  std::vector<double> density;
  std::vector<double> cdf;
  double mean = 0.0;
  double variance = 0.0;
};

GridPosterior grid_posterior(const std::vector<double>& y, double prior_mean, double prior_var, double sigma2,
                             double lo = -3.0, double hi = 3.0, std::size_t points = 10000) {
  GridPosterior g;
  const double h = (hi - lo) / static_cast<double>(points - 1);
  std::vector<double> logd(points);
  for (std::size_t k = 0; k < points; ++k) {
    const double th = lo + h * static_cast<double>(k);
    double ll = -0.5 * (th - prior_mean) * (th - prior_mean) / prior_var;
    double prev = 0.0;
    for (double v : y) {
      const double e = v - th * prev;
      ll -= 0.5 * e * e / sigma2;
      prev = v;
    }
    g.theta.push_back(th);
    logd[k] = ll;
  }
  const double peak = *std::max_element(logd.begin(), logd.end());
  for (double l : logd) g.density.push_back(std::exp(l - peak));
  auto trapezoid = [&](auto f) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < points; ++k) s += 0.5 * h * (f(k) + f(k + 1));
    return s;
  };
  const double z = trapezoid([&](std::size_t k) { return g.density[k]; });
  for (auto& d : g.density) d /= z;
  g.mean = trapezoid([&](std::size_t k) { return g.theta[k] * g.density[k]; });
  g.variance = trapezoid([&](std::size_t k) { return (g.theta[k] - g.mean) * (g.theta[k] - g.mean) * g.density[k]; });
  g.cdf.assign(points, 0.0);
  for (std::size_t k = 1; k < points; ++k) g.cdf[k] = g.cdf[k - 1] + 0.5 * h * (g.density[k - 1] + g.density[k]);
  return g;
}

double grid_cdf(const GridPosterior& g, double x) {
  if (x <= g.theta.front()) return 0.0;
  if (x >= g.theta.back()) return 1.0;
  const auto it = std::upper_bound(g.theta.begin(), g.theta.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - g.theta.begin());
  const double f = (x - g.theta[k - 1]) / (g.theta[k] - g.theta[k - 1]);
  return g.cdf[k - 1] + f * (g.cdf[k] - g.cdf[k - 1]);
}

}  // namespace

TEST_CASE("ar_simulate") {
  const std::vector<double> c07{0.7};
  SUBCASE("zero noise from zero state stays at zero") {
    const Trajectory y = ar_simulate(c07, 0.0, 50, RngStream(1, 0));
    for (double v : y.observations) CHECK(v == 0.0);
  }
  SUBCASE("stationary variance") {
    const Trajectory y = ar_simulate(c07, 1.0, 500, RngStream(1, 1));
    CHECK(std::abs(sample_variance(y.observations) - 1.0 / 0.51) < 0.2 / 0.51);
  }
  SUBCASE("zero coefficient is white noise") {
    const std::vector<double> c0{0.0};
    const Trajectory y = ar_simulate(c0, 1.0, 1000, RngStream(1, 2));
    CHECK(std::abs(sample_autocorrelation(y.observations, 1)) < 5.0 / std::sqrt(1000.0));
  }
  SUBCASE("argument validation") {
    CHECK_THROWS_AS(ar_simulate(c07, -1.0, 5, RngStream(1, 3)), InvalidArgument);
    CHECK_THROWS_AS(ar_simulate(c07, 1.0, 0, RngStream(1, 3)), InvalidArgument);
    CHECK_THROWS_AS(ar_simulate(std::vector<double>{}, 1.0, 5, RngStream(1, 3)), InvalidArgument);
  }
}

TEST_CASE("ar_surprisal closed forms") {
  const std::vector<double> c07{0.7};
  const std::vector<double> c0{0.0};
  CHECK(ar_surprisal(c07, 1.0, Trajectory{{0.0}, {}}) == doctest::Approx(kHalfLog2Pi).epsilon(1e-14));
  CHECK(ar_surprisal(c0, 1.0, Trajectory{{1.0, 1.0}, {}}) == doctest::Approx(2.0 * (kHalfLog2Pi + 0.5)).epsilon(1e-14));
  CHECK(2.0 * (kHalfLog2Pi + 0.5) == doctest::Approx(2.8378771).epsilon(1e-7));

  const double s2 = 1e-6;
  const Trajectory zeros{std::vector<double>(7, 0.0), {}};
  CHECK(ar_surprisal(c07, s2, zeros) ==
        doctest::Approx(7.0 * 0.5 * std::log(2.0 * std::numbers::pi * s2)).epsilon(1e-14));
  CHECK_THROWS_AS(ar_surprisal(c07, 0.0, zeros), InvalidArgument);
}

TEST_CASE("ar_surprisal equals the per-step Gaussian sum for AR(2)") {
  const std::vector<double> c{-0.3, 0.5};
  const Trajectory y = ar_simulate(c, 0.8, 30, RngStream(2, 0));
  double oracle = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double y1 = t >= 1 ? y.observations[t - 1] : 0.0;
    const double y2 = t >= 2 ? y.observations[t - 2] : 0.0;
    const double e = y.observations[t] - (-0.3 * y1 + 0.5 * y2);
    oracle -= normal_logpdf(e, 0.0, 0.8);
  }
  CHECK(ar_surprisal(c, 0.8, y) == doctest::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("simulation and likelihood are coherent: mean surprisal rate is the entropy") {
  const std::vector<double> c07{0.7};
  for (double s2 : {1.0, 2.0}) {
    double total = 0.0;
    const std::size_t length = 100;
    for (std::uint64_t r = 0; r < 200; ++r) {
      total += ar_surprisal(c07, s2, ar_simulate(c07, s2, length, RngStream(3, r))) / length;
    }
    const double entropy = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * s2);
    CHECK(std::abs(total / 200.0 - entropy) < 0.02 * std::abs(entropy));
  }
}

TEST_CASE("ar1_posterior") {
  SUBCASE("single sample carries no information") {
    const auto post = ar1_posterior(Trajectory{{2.5}, {}}, 0.3, 2.0, 1.0);
    CHECK(post.mean == 0.3);
    CHECK(post.variance == 2.0);
  }
  SUBCASE("hand evaluation") {
    const auto post = ar1_posterior(Trajectory{{1.0, 1.0}, {}}, 0.0, 1.0, 1.0);
    CHECK(post.variance == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(post.mean == doctest::Approx(0.5).epsilon(1e-15));
    const auto grid = grid_posterior({1.0, 1.0}, 0.0, 1.0, 1.0, -7.0, 8.0, 20000);
    CHECK(std::abs(grid.mean - 0.5) < 1e-4);
    CHECK(std::abs(grid.variance - 0.5) < 1e-4);
  }
  SUBCASE("grid quadrature oracle on simulated records") {
    for (std::uint64_t r = 0; r < 4; ++r) {
      const Trajectory y = generate_case(SyntheticCase::I, 25, RngStream(4, r));
      const double prior_mean = 0.2 * static_cast<double>(r) - 0.3;
      const double s2 = r % 2 == 0 ? 1.0 : 2.0;
      const auto post = ar1_posterior(y, prior_mean, 1.0, s2);
      const auto grid = grid_posterior(y.observations, prior_mean, 1.0, s2);
      CHECK(std::abs(post.mean - grid.mean) < 1e-4);
      CHECK(std::abs(post.variance - grid.variance) < 1e-4);
    }
  }
  SUBCASE("consistency at T = 10000") {
    const Trajectory y = generate_case(SyntheticCase::I, 10000, RngStream(4, 99));
    CHECK(std::abs(ar1_posterior(y, 0.0, 1.0, 1.0).mean - 0.7) < 0.05);
  }
  SUBCASE("flat prior limit approaches least squares") {
    const Trajectory y = generate_case(SyntheticCase::I, 200, RngStream(4, 5));
    const double ls = ml_estimate_ar(y, 1)[0];
    CHECK(std::abs(ar1_posterior(y, 0.0, 1e6, 1.0).mean - ls) < 1e-4);
  }
  CHECK_THROWS_AS(ar1_posterior(Trajectory{{1.0}, {}}, 0.0, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("Ar1PosteriorSampler") {
  const Trajectory y = generate_case(SyntheticCase::I, 30, RngStream(5, 0));
  const Ar1PosteriorSampler sampler(y, 0.0, 1.0, 1.0);
  const auto& post = sampler.posterior();

  SUBCASE("sample mean") {
    const PosteriorDraws d = sampler.draw(1000, RngStream(5, 1));
    CHECK(d.size() == 1000);
    CHECK(d.equally_weighted());
    double m = 0.0;
    for (const auto& p : d.draws()) m += p[0] / 1000.0;
    CHECK(std::abs(m - post.mean) < 4.0 * std::sqrt(post.variance / 1000.0));
  }
  SUBCASE("KS distance against the quadrature CDF") {
    const auto grid = grid_posterior(y.observations, 0.0, 1.0, 1.0);
    const PosteriorDraws d = sampler.draw(2000, RngStream(5, 2));
    std::vector<double> u;
    for (const auto& p : d.draws()) u.push_back(grid_cdf(grid, p[0]));
    CHECK(ks_distance_uniform(u) < 0.05);
  }
  SUBCASE("no information: draws follow the prior") {
    const Ar1PosteriorSampler prior_only(Trajectory{{0.4}, {}}, 0.0, 1.0, 1.0);
    const PosteriorDraws d = prior_only.draw(2000, RngStream(5, 3));
    std::vector<double> u;
    for (const auto& p : d.draws()) u.push_back(1.0 - normal_sf(p[0]));
    CHECK(ks_distance_uniform(u) < 0.05);
  }
  SUBCASE("determinism") {
    CHECK(sampler.draw(10, RngStream(5, 4)).draws() == sampler.draw(10, RngStream(5, 4)).draws());
  }
}

TEST_CASE("ml_estimate_ar") {
  SUBCASE("noiseless orbit fitted from the second sample") {
    std::vector<double> obs;
    for (int t = 1; t <= 30; ++t) obs.push_back(std::pow(0.5, t));
    CHECK(std::abs(ml_estimate_ar(Trajectory{obs, {}}, 1, 1)[0] - 0.5) < 1e-10);
  }
  SUBCASE("white noise") {
    const std::vector<double> c0{0.0};
    const Trajectory y = ar_simulate(c0, 1.0, 10000, RngStream(6, 0));
    CHECK(std::abs(ml_estimate_ar(y, 1)[0]) < 5.0 / 100.0);
  }
  SUBCASE("Case i consistency") {
    const Trajectory y = generate_case(SyntheticCase::I, 10000, RngStream(6, 1));
    CHECK(std::abs(ml_estimate_ar(y, 1)[0] - 0.7) < 0.02);
  }
  SUBCASE("AR(2) recovers both coefficients") {
    const Trajectory y = generate_case(SyntheticCase::III, 10000, RngStream(6, 2));
    const ParamVector est = ml_estimate_ar(y, 2);
    CHECK(std::abs(est[0] + 0.3) < 0.03);
    CHECK(std::abs(est[1] - 0.5) < 0.03);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(ml_estimate_ar(Trajectory{std::vector<double>(10, 0.0), {}}, 1), DegenerateInput);
    CHECK_THROWS_AS(ml_estimate_ar(Trajectory{{1.0}, {}}, 1), InvalidArgument);
  }
}

TEST_CASE("prediction_errors") {
  const std::vector<double> c07{0.7};
  const std::vector<double> c0{0.0};
  const Trajectory y{{1.0, 0.7}, {}};
  const auto e = prediction_errors(y, c07);
  CHECK(e[0] == 1.0);
  CHECK(std::abs(e[1]) < 1e-15);
  CHECK(prediction_errors(y, c0) == y.observations);

  std::vector<double> orbit{1.0};
  for (int t = 1; t < 20; ++t) orbit.push_back(0.7 * orbit.back());
  const auto noiseless = prediction_errors(Trajectory{orbit, {}}, c07);
  for (std::size_t t = 1; t < noiseless.size(); ++t) CHECK(std::abs(noiseless[t]) < 1e-15);
}

TEST_CASE("synthetic cases") {
  SUBCASE("names") {
    CHECK(parse_case("ii") == SyntheticCase::II);
    CHECK(parse_case("case-IV") == SyntheticCase::IV);
    CHECK(case_name(SyntheticCase::III) == "case-iii");
    CHECK_THROWS_AS(parse_case("vi"), InvalidArgument);
    CHECK(model_class_variance(SyntheticCase::V) == 0.1);
    CHECK(model_class_variance(SyntheticCase::IV) == 1.0);
  }
  SUBCASE("Case ii saturation floor") {
    for (std::uint64_t r = 0; r < 50; ++r) {
      const Trajectory y = generate_case(SyntheticCase::II, 200, RngStream(7, r));
      CHECK(*std::min_element(y.observations.begin(), y.observations.end()) >= -0.3);
    }
  }
  SUBCASE("stationary variances") {
    const Trajectory one = generate_case(SyntheticCase::I, 10000, RngStream(7, 100));
    CHECK(std::abs(sample_variance(one.observations) - 1.9608) < 0.19608);
    const Trajectory four = generate_case(SyntheticCase::IV, 10000, RngStream(7, 101));
    CHECK(std::abs(sample_variance(four.observations) - 0.19608) < 0.019608);
  }
  SUBCASE("determinism") {
    CHECK(generate_case(SyntheticCase::III, 50, RngStream(7, 200)).observations ==
          generate_case(SyntheticCase::III, 50, RngStream(7, 200)).observations);
  }
}
