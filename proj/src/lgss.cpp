#include "itmc/lgss.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "itmc/errors.hpp"
#include "itmc/stats.hpp"

namespace itmc {

void validate(const LgssModel& lgss) {
  if (!(lgss.q >= 0.0) || !(lgss.r > 0.0) || !(lgss.p0 >= 0.0)) {
    throw InvalidArgument("LgssModel: need q >= 0, r > 0 and p0 >= 0");
  }
}

KalmanFilterOutput kalman_filter(const LgssModel& m, const Trajectory& y) {
  validate(m);
  const std::size_t len = y.size();
  if (len == 0) throw InvalidArgument("kalman_filter: empty record");
  KalmanFilterOutput out;
  out.filtered_mean.resize(len);
  out.filtered_var.resize(len);
  out.predicted_mean.resize(len);
  out.predicted_var.resize(len);
  double mp = m.m0;
  double pp = m.p0;
  for (std::size_t t = 0; t < len; ++t) {
    out.predicted_mean[t] = mp;
    out.predicted_var[t] = pp;
    const double s = m.c * m.c * pp + m.r;
    if (!(s > 0.0) || !std::isfinite(s)) throw NumericalError("kalman_filter: innovation variance is not positive");
    const double innov = y.observations[t] - m.c * mp;
    out.loglik += -0.5 * (std::log(2.0 * std::numbers::pi * s) + innov * innov / s);
    const double gain = pp * m.c / s;
    const double mf = mp + gain * innov;
    const double pf = (1.0 - gain * m.c) * pp;
    out.filtered_mean[t] = mf;
    out.filtered_var[t] = pf;
    mp = m.a * mf;
    pp = m.a * m.a * pf + m.q;
  }
  return out;
}

double kalman_loglik(const LgssModel& lgss, const Trajectory& y) { return kalman_filter(lgss, y).loglik; }

SmootherMoments kalman_smoother(const LgssModel& m, const Trajectory& y) {
  const KalmanFilterOutput kf = kalman_filter(m, y);
  const std::size_t len = y.size();
  SmootherMoments out{kf.filtered_mean, kf.filtered_var};
  for (std::size_t t = len - 1; t-- > 0;) {
    const double pred_var = kf.predicted_var[t + 1];
    // A vanishing predicted variance means x_{t+1} is known given x_t.
    const double g = pred_var > 0.0 ? kf.filtered_var[t] * m.a / pred_var : 0.0;
    out.mean[t] = kf.filtered_mean[t] + g * (out.mean[t + 1] - kf.predicted_mean[t + 1]);
    out.var[t] = kf.filtered_var[t] + g * g * (out.var[t + 1] - pred_var);
  }
  return out;
}

std::vector<double> kalman_smoother_means(const LgssModel& lgss, const Trajectory& y) {
  return kalman_smoother(lgss, y).mean;
}

LgssStateSpace::LgssStateSpace(LgssModel base) : base_(base) {
  validate(base_);
  if (!(base_.q > 0.0)) throw InvalidArgument("LgssStateSpace: process noise variance must be positive");
}

LgssModel LgssStateSpace::at(const ParamVector& theta) const {
  if (theta.size() != 1) throw InvalidArgument("LgssStateSpace: theta must be (a)");
  LgssModel m = base_;
  m.a = theta[0];
  return m;
}

State LgssStateSpace::sample_initial_state(const ParamVector&, Engine& engine) const {
  return {gaussian_sample(base_.m0, base_.p0, engine), 0.0};
}

double LgssStateSpace::initial_logdensity(const ParamVector&, const State& x) const {
  if (base_.p0 == 0.0) return x[0] == base_.m0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return normal_logpdf(x[0], base_.m0, base_.p0);
}

State LgssStateSpace::sample_transition(const ParamVector& theta, const State& x, double, std::size_t,
                                        Engine& engine) const {
  return {gaussian_sample(theta[0] * x[0], base_.q, engine), 0.0};
}

double LgssStateSpace::transition_logdensity(const ParamVector& theta, const State& next, const State& x, double,
                                             std::size_t) const {
  return normal_logpdf(next[0], theta[0] * x[0], base_.q);
}

double LgssStateSpace::sample_observation(const ParamVector&, const State& x, std::size_t, Engine& engine) const {
  return gaussian_sample(base_.c * x[0], base_.r, engine);
}

double LgssStateSpace::observation_logdensity(const ParamVector&, double y, const State& x, std::size_t) const {
  return normal_logpdf(y, base_.c * x[0], base_.r);
}

State LgssStateSpace::standardized_process_noise(const ParamVector& theta, const State& next, const State& x, double,
                                                 std::size_t) const {
  return {(next[0] - theta[0] * x[0]) / std::sqrt(base_.q), 0.0};
}

}  // namespace itmc
