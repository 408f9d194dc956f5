#pragma once

// Models and samplers shared by the unit and acceptance suites.

#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "itmc/itmc.hpp"
#include "itmc/model.hpp"
#include "itmc/state_space.hpp"

namespace itmc::testing {

/// Binary Markov chain with dyadic probabilities (multiples of 1/8), so every
/// sequence probability and every sum of them is exact in double precision
/// for T <= 10. theta = (table index).
class BinaryMarkovModel final : public EnumerableModel {
 public:
  struct Row {
    double p_first_one;  // P(y_0 = 1)
    double p_stay_zero;  // P(y_t = 0 | y_{t-1} = 0)
    double p_stay_one;   // P(y_t = 1 | y_{t-1} = 1)
  };

  static const std::vector<Row>& table() {
    static const std::vector<Row> rows{
        {4.0 / 8, 4.0 / 8, 4.0 / 8},  // fair coin: constant surprisal
        {3.0 / 8, 6.0 / 8, 5.0 / 8},
        {4.0 / 8, 7.0 / 8, 2.0 / 8},
        {1.0 / 8, 5.0 / 8, 7.0 / 8},
    };
    return rows;
  }

  std::size_t param_dim() const override { return 1; }

  static const Row& row(const ParamVector& theta) { return table().at(static_cast<std::size_t>(theta[0])); }

  static double step_probability(const Row& r, int prev, int cur) {
    const double stay = prev == 0 ? r.p_stay_zero : r.p_stay_one;
    return prev == cur ? stay : 1.0 - stay;
  }

  Trajectory simulate(const ParamVector& theta, std::span<const double>, std::size_t length,
                      const RngStream& rng) const override {
    const Row& r = row(theta);
    Engine engine = rng.engine();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Trajectory out;
    int prev = unif(engine) < r.p_first_one ? 1 : 0;
    out.observations.push_back(prev);
    for (std::size_t t = 1; t < length; ++t) {
      const double p_one = prev == 1 ? r.p_stay_one : 1.0 - r.p_stay_zero;
      prev = unif(engine) < p_one ? 1 : 0;
      out.observations.push_back(prev);
    }
    return out;
  }

  double surprisal(const ParamVector& theta, const Trajectory& y, const RngStream&) const override {
    const Row& r = row(theta);
    const auto& obs = y.observations;
    double p = obs[0] > 0.5 ? r.p_first_one : 1.0 - r.p_first_one;
    for (std::size_t t = 1; t < obs.size(); ++t) p *= step_probability(r, obs[t - 1] > 0.5, obs[t] > 0.5);
    return -std::log(p);
  }

  std::vector<WeightedTrajectory> enumerate(const ParamVector& theta, std::span<const double>,
                                            std::size_t length) const override {
    if (length > 20) throw std::invalid_argument("BinaryMarkovModel: too many sequences to enumerate");
    const Row& r = row(theta);
    std::vector<WeightedTrajectory> out;
    for (std::size_t code = 0; code < (std::size_t{1} << length); ++code) {
      WeightedTrajectory w;
      for (std::size_t t = 0; t < length; ++t) w.trajectory.observations.push_back(static_cast<double>((code >> t) & 1));
      const auto& obs = w.trajectory.observations;
      double p = obs[0] > 0.5 ? r.p_first_one : 1.0 - r.p_first_one;
      for (std::size_t t = 1; t < length; ++t) p *= step_probability(r, obs[t - 1] > 0.5, obs[t] > 0.5);
      w.probability = p;
      out.push_back(std::move(w));
    }
    return out;
  }
};

/// Categorical weights over a fixed list of parameter points.
class DiscreteSampler final : public PosteriorSampler {
 public:
  DiscreteSampler(std::vector<ParamVector> points, std::vector<double> probabilities)
      : points_(std::move(points)), probabilities_(std::move(probabilities)) {}

  PosteriorDraws draw(std::size_t n, const RngStream& rng) const override {
    Engine engine = rng.engine();
    std::discrete_distribution<std::size_t> pick(probabilities_.begin(), probabilities_.end());
    std::vector<ParamVector> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(points_[pick(engine)]);
    return PosteriorDraws(std::move(out));
  }

 private:
  std::vector<ParamVector> points_;
  std::vector<double> probabilities_;
};

/// Returns the same weighted draws every time (ignores n beyond a size check).
class FixedDrawsSampler final : public PosteriorSampler {
 public:
  explicit FixedDrawsSampler(PosteriorDraws draws) : draws_(std::move(draws)) {}
  PosteriorDraws draw(std::size_t n, const RngStream&) const override {
    if (n != draws_.size()) throw std::invalid_argument("FixedDrawsSampler: size mismatch");
    return draws_;
  }

 private:
  PosteriorDraws draws_;
};

/// Generative model whose surprisal is the same for every record.
class ConstantSurprisalModel final : public GenerativeModel {
 public:
  std::size_t param_dim() const override { return 1; }
  Trajectory simulate(const ParamVector&, std::span<const double> inputs, std::size_t length,
                      const RngStream& rng) const override {
    Engine engine = rng.engine();
    std::normal_distribution<double> n(0.0, 1.0);
    Trajectory out;
    for (std::size_t t = 0; t < length; ++t) out.observations.push_back(n(engine));
    out.inputs.assign(inputs.begin(), inputs.end());
    return out;
  }
  double surprisal(const ParamVector&, const Trajectory&, const RngStream&) const override { return 3.25; }
};

/// Wraps a state-space model and replaces its observation density by the
/// constant 0 (uninformative observations).
class FlatObservation final : public StateSpaceModel {
 public:
  explicit FlatObservation(const StateSpaceModel& inner) : inner_(inner) {}

  std::size_t state_dim() const override { return inner_.state_dim(); }
  std::size_t param_dim() const override { return inner_.param_dim(); }
  State sample_initial_state(const ParamVector& theta, Engine& engine) const override {
    return inner_.sample_initial_state(theta, engine);
  }
  double initial_logdensity(const ParamVector& theta, const State& x) const override {
    return inner_.initial_logdensity(theta, x);
  }
  State sample_transition(const ParamVector& theta, const State& x, double u, std::size_t t,
                          Engine& engine) const override {
    return inner_.sample_transition(theta, x, u, t, engine);
  }
  double transition_logdensity(const ParamVector& theta, const State& next, const State& x, double u,
                               std::size_t t) const override {
    return inner_.transition_logdensity(theta, next, x, u, t);
  }
  double sample_observation(const ParamVector& theta, const State& x, std::size_t t, Engine& engine) const override {
    return inner_.sample_observation(theta, x, t, engine);
  }
  double observation_logdensity(const ParamVector&, double, const State&, std::size_t) const override { return 0.0; }
  State standardized_process_noise(const ParamVector& theta, const State& next, const State& x, double u,
                                   std::size_t t) const override {
    return inner_.standardized_process_noise(theta, next, x, u, t);
  }

 private:
  const StateSpaceModel& inner_;
};

struct EnumeratedTails {
  double ge = 0.0;  // P(D >= D_obs) = P(p(y) <= p(y_obs))
  double le = 0.0;  // P(D <= D_obs)
  double pvalue() const { return std::min(1.0, 2.0 * std::min(ge, le)); }
};

/// Exact tail probabilities of the binary Markov model by listing every
/// sequence; written independently of the library's enumeration path.
inline EnumeratedTails enumerated_tails(const BinaryMarkovModel::Row& r, const std::vector<int>& observed) {
  const std::size_t len = observed.size();
  auto prob = [&](const std::vector<int>& s) {
    double p = s[0] == 1 ? r.p_first_one : 1.0 - r.p_first_one;
    for (std::size_t t = 1; t < len; ++t) {
      const double stay = s[t - 1] == 0 ? r.p_stay_zero : r.p_stay_one;
      p *= s[t] == s[t - 1] ? stay : 1.0 - stay;
    }
    return p;
  };
  const double p_obs = prob(observed);
  EnumeratedTails tails;
  std::vector<int> s(len, 0);
  for (std::size_t code = 0; code < (std::size_t{1} << len); ++code) {
    for (std::size_t t = 0; t < len; ++t) s[t] = static_cast<int>((code >> t) & 1);
    const double p = prob(s);
    if (p <= p_obs) tails.ge += p;
    if (p >= p_obs) tails.le += p;
  }
  return tails;
}

inline double enumerated_pvalue(const BinaryMarkovModel::Row& r, const std::vector<int>& observed) {
  return enumerated_tails(r, observed).pvalue();
}

}  // namespace itmc::testing
