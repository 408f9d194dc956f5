#include "itmc/ljung_box.hpp"

#include <algorithm>
#include <cmath>

#include "itmc/ar_models.hpp"
#include "itmc/errors.hpp"
#include "itmc/stats.hpp"

namespace itmc {

LjungBoxResult ljung_box(std::span<const double> residuals, std::size_t lags, std::size_t estimated_params) {
  if (lags <= estimated_params) throw InvalidArgument("ljung_box: need more lags than estimated parameters");
  const std::size_t n = residuals.size();
  if (n <= lags) throw InvalidArgument("ljung_box: record must be longer than the lag count");
  LjungBoxResult out;
  out.lags = lags;
  out.estimated_params = estimated_params;
  out.autocorrelations.resize(lags);
  const double len = static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t k = 1; k <= lags; ++k) {
    const double r = sample_autocorrelation(residuals, k);
    out.autocorrelations[k - 1] = r;
    sum += r * r / (len - static_cast<double>(k));
  }
  out.q = len * (len + 2.0) * sum;
  out.p_value = chi_square_sf(out.q, static_cast<unsigned>(lags - estimated_params));
  return out;
}

std::size_t default_ljung_box_lags(std::size_t length, std::size_t order) {
  const auto rounded = static_cast<std::size_t>(std::lround(std::log(static_cast<double>(length))));
  return std::max(order + 1, rounded);
}

LjungBoxResult ljung_box_for_ar(const Trajectory& y, std::size_t order, std::size_t lags) {
  validate_trajectory(y);
  const ParamVector coeffs = ml_estimate_ar(y, order);
  const std::vector<double> residuals = prediction_errors(y, coeffs.values());
  return ljung_box(residuals, lags == 0 ? default_ljung_box_lags(y.size(), order) : lags, order);
}

}  // namespace itmc
