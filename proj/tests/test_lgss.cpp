#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "itmc/errors.hpp"
#include "itmc/lgss.hpp"
#include "itmc/stats.hpp"

using namespace itmc;

namespace {

// Joint Gaussian of (x_0..x_{T-1}, y_0..y_{T-1}) written out densely.
struct DenseGaussian {
  Eigen::VectorXd mean_x;
  Eigen::MatrixXd cov_x;
};

DenseGaussian dense_states(const LgssModel& m, std::size_t len) {
  const auto n = static_cast<Eigen::Index>(len);
  DenseGaussian g{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  std::vector<double> var(len);
  for (std::size_t t = 0; t < len; ++t) {
    g.mean_x(static_cast<Eigen::Index>(t)) = std::pow(m.a, double(t)) * m.m0;
    double v = std::pow(m.a, 2.0 * double(t)) * m.p0;
    for (std::size_t s = 0; s < t; ++s) v += std::pow(m.a, 2.0 * double(s)) * m.q;
    var[t] = v;
  }
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t j = 0; j < len; ++j) {
      const std::size_t lo = std::min(i, j);
      const std::size_t hi = std::max(i, j);
      g.cov_x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::pow(m.a, double(hi - lo)) * var[lo];
    }
  }
  return g;
}

struct Conditioned {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;
  double loglik;
};

Conditioned dense_condition(const LgssModel& m, const std::vector<double>& y) {
  const DenseGaussian g = dense_states(m, y.size());
  const auto n = static_cast<Eigen::Index>(y.size());
  const Eigen::MatrixXd syy = m.c * m.c * g.cov_x + m.r * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd sxy = m.c * g.cov_x;
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  const Eigen::VectorXd resid = yv - m.c * g.mean_x;
  const Eigen::LLT<Eigen::MatrixXd> llt(syy);
  const Eigen::VectorXd alpha = llt.solve(resid);
  Conditioned out;
  out.mean = g.mean_x + sxy * alpha;
  out.var = (g.cov_x - sxy * llt.solve(sxy.transpose())).diagonal();
  const Eigen::MatrixXd l = llt.matrixL();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) logdet += 2.0 * std::log(l(i, i));
  out.loglik = -0.5 * (double(n) * std::log(2.0 * std::numbers::pi) + logdet + resid.dot(alpha));
  return out;
}

}  // namespace

TEST_CASE("kalman_loglik closed forms") {
  SUBCASE("single step, a = 0, q -> 0") {
    LgssModel m{0.0, 1.0, 0.0, 1.0, 0.0, 1.0};
    CHECK(kalman_loglik(m, Trajectory{{0.0}, {}}) ==
          doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi * 2.0)).epsilon(1e-14));
  }
  SUBCASE("pure observation noise") {
    LgssModel m{0.8, 1.0, 1.0, 0.5, 0.0, 0.0};
    CHECK(kalman_loglik(m, Trajectory{{1.3}, {}}) == doctest::Approx(normal_logpdf(1.3, 0.0, 0.5)).epsilon(1e-14));
  }
  SUBCASE("errors") {
    LgssModel bad{0.8, 1.0, 1.0, 0.0, 0.0, 1.0};
    CHECK_THROWS_AS(kalman_loglik(bad, Trajectory{{1.0}, {}}), InvalidArgument);
    LgssModel zero_innovation{0.8, 0.0, 1.0, 1.0, 0.0, 1.0};
    zero_innovation.r = 1.0;
    CHECK_NOTHROW(kalman_loglik(zero_innovation, Trajectory{{1.0}, {}}));
    CHECK_THROWS_AS(kalman_loglik(LgssModel{}, Trajectory{}), InvalidArgument);
  }
}

TEST_CASE("Kalman recursions match dense Gaussian conditioning") {
  const LgssModel models[] = {
      LgssModel{},
      LgssModel{0.95, 1.3, 0.4, 2.0, 0.5, 3.0},
      LgssModel{-0.5, 0.7, 2.0, 0.1, -1.0, 0.2},
  };
  Engine engine = RngStream(20, 0).engine();
  for (const LgssModel& m : models) {
    for (std::size_t len : {1u, 2u, 5u}) {
      std::vector<double> y(len);
      for (auto& v : y) v = 2.0 * standard_normal(engine);
      const Trajectory traj{y, {}};
      const Conditioned oracle = dense_condition(m, y);
      CHECK(kalman_loglik(m, traj) == doctest::Approx(oracle.loglik).epsilon(1e-12));
      const SmootherMoments sm = kalman_smoother(m, traj);
      for (std::size_t t = 0; t < len; ++t) {
        CHECK(std::abs(sm.mean[t] - oracle.mean(static_cast<Eigen::Index>(t))) < 1e-12);
        CHECK(std::abs(sm.var[t] - oracle.var(static_cast<Eigen::Index>(t))) < 1e-12);
      }
    }
  }
}

TEST_CASE("kalman_smoother_means special cases") {
  SUBCASE("deterministic orbit") {
    const LgssModel m{0.9, 1.0, 0.0, 1.0, 2.0, 0.0};
    const std::vector<double> y{5.0, -3.0, 0.1, 4.0, 2.2, 1.0};
    const auto means = kalman_smoother_means(m, Trajectory{y, {}});
    for (std::size_t t = 0; t < y.size(); ++t) CHECK(means[t] == doctest::Approx(2.0 * std::pow(0.9, double(t))));
  }
  SUBCASE("T = 1 equals the filter mean") {
    const LgssModel m{};
    const Trajectory y{{1.7}, {}};
    CHECK(kalman_smoother_means(m, y)[0] == kalman_filter(m, y).filtered_mean[0]);
  }
  SUBCASE("last smoother mean equals last filter mean") {
    const LgssModel m{};
    const Trajectory y{{0.3, 1.2, -0.4, 2.0}, {}};
    CHECK(kalman_smoother_means(m, y).back() == kalman_filter(m, y).filtered_mean.back());
  }
}

TEST_CASE("LgssStateSpace densities") {
  const LgssStateSpace model(LgssModel{});
  const ParamVector theta{0.6};
  const State x{1.5, 0.0};
  const State next{0.2, 0.0};
  CHECK(model.transition_logdensity(theta, next, x, 0.0, 0) == doctest::Approx(normal_logpdf(0.2, 0.9, 1.0)));
  CHECK(model.observation_logdensity(theta, 2.0, x, 0) == doctest::Approx(normal_logpdf(2.0, 1.5, 1.0)));
  CHECK(model.initial_logdensity(theta, x) == doctest::Approx(normal_logpdf(1.5, 0.0, 1.0)));
  CHECK(model.standardized_process_noise(theta, next, x, 0.0, 0)[0] == doctest::Approx(-0.7));
  CHECK(model.at(theta).a == 0.6);
  CHECK_THROWS_AS(LgssStateSpace(LgssModel{0.8, 1.0, 0.0, 1.0, 0.0, 1.0}), InvalidArgument);
}

TEST_CASE("LgssStateSpace transition sampler matches its density (binned chi-square)") {
  const LgssStateSpace model(LgssModel{});
  const ParamVector theta{0.8};
  const State x{1.0, 0.0};
  Engine engine = RngStream(21, 0).engine();
  const int n = 1000000;
  const int bins = 20;
  const double lo = -3.2;
  const double hi = 4.8;
  std::vector<double> counts(bins, 0.0);
  for (int k = 0; k < n; ++k) {
    const double v = model.sample_transition(theta, x, 0.0, 0, engine)[0];
    if (v >= lo && v < hi) counts[static_cast<std::size_t>((v - lo) / (hi - lo) * bins)] += 1.0;
  }
  double chi2 = 0.0;
  const double w = (hi - lo) / bins;
  for (int b = 0; b < bins; ++b) {
    // Simpson's rule on exp(transition_logdensity) over the bin.
    const double a = lo + b * w;
    auto f = [&](double v) { return std::exp(model.transition_logdensity(theta, State{v, 0.0}, x, 0.0, 0)); };
    const double p = w / 6.0 * (f(a) + 4.0 * f(a + 0.5 * w) + f(a + w));
    const double expected = n * p;
    chi2 += (counts[b] - expected) * (counts[b] - expected) / expected;
  }
  CHECK(chi_square_sf(chi2, bins - 1) > 1e-3);
}
