#pragma once

#include <vector>

#include "itmc/model.hpp"
#include "itmc/state_space.hpp"

namespace itmc {

/// Scalar linear-Gaussian state-space model
///
///   x_0 ~ N(m0, p0),  x_{t+1} = a x_t + v_t,  y_t = c x_t + e_t,
///   v_t ~ N(0, q),    e_t ~ N(0, r).
///
/// Serves as the exact oracle (Kalman filter / RTS smoother) for the
/// particle methods.
struct LgssModel {
  double a = 0.8;
  double c = 1.0;
  double q = 1.0;
  double r = 1.0;
  double m0 = 0.0;
  double p0 = 1.0;
};

void validate(const LgssModel& lgss);

/// Exact log-likelihood by the prediction-error decomposition.
double kalman_loglik(const LgssModel& lgss, const Trajectory& y);

struct KalmanFilterOutput {
  std::vector<double> filtered_mean;
  std::vector<double> filtered_var;
  std::vector<double> predicted_mean;  // E[x_t | y_{0:t-1}]
  std::vector<double> predicted_var;
  double loglik = 0.0;
};

KalmanFilterOutput kalman_filter(const LgssModel& lgss, const Trajectory& y);

/// E[x_t | y_{0:T-1}] by the Rauch-Tung-Striebel recursion.
std::vector<double> kalman_smoother_means(const LgssModel& lgss, const Trajectory& y);

struct SmootherMoments {
  std::vector<double> mean;
  std::vector<double> var;
};

SmootherMoments kalman_smoother(const LgssModel& lgss, const Trajectory& y);

/// State-space view of an LGSS with theta = (a); every other quantity is
/// taken from `base`.
class LgssStateSpace final : public StateSpaceModel {
 public:
  explicit LgssStateSpace(LgssModel base);

  std::size_t state_dim() const override { return 1; }
  std::size_t param_dim() const override { return 1; }

  State sample_initial_state(const ParamVector& theta, Engine& engine) const override;
  double initial_logdensity(const ParamVector& theta, const State& x) const override;
  State sample_transition(const ParamVector& theta, const State& x, double input, std::size_t t,
                          Engine& engine) const override;
  double transition_logdensity(const ParamVector& theta, const State& next, const State& x, double input,
                               std::size_t t) const override;
  double sample_observation(const ParamVector& theta, const State& x, std::size_t t, Engine& engine) const override;
  double observation_logdensity(const ParamVector& theta, double y, const State& x, std::size_t t) const override;
  State standardized_process_noise(const ParamVector& theta, const State& next, const State& x, double input,
                                   std::size_t t) const override;

  const LgssModel& base() const { return base_; }
  /// The full LGSS with `a` taken from theta.
  LgssModel at(const ParamVector& theta) const;

 private:
  LgssModel base_;
};

}  // namespace itmc
