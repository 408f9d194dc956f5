#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "itmc/model.hpp"

namespace itmc {

struct LjungBoxResult {
  double q = 0.0;
  std::size_t lags = 0;              // h
  std::size_t estimated_params = 0;  // d
  double p_value = 1.0;              // P(chi^2_{h-d} >= q)
  std::vector<double> autocorrelations;  // r_1 .. r_h
};

/// Q = T (T + 2) sum_{k=1}^{h} r_k^2 / (T - k), referred to chi^2_{h-d}.
LjungBoxResult ljung_box(std::span<const double> residuals, std::size_t lags, std::size_t estimated_params);

/// max(order + 1, round(ln T)).
std::size_t default_ljung_box_lags(std::size_t length, std::size_t order);

/// Fits AR(order) coefficients by conditional least squares, then applies
/// ljung_box to the prediction errors with d = order. `lags` = 0 selects
/// default_ljung_box_lags.
LjungBoxResult ljung_box_for_ar(const Trajectory& y, std::size_t order, std::size_t lags = 0);

}  // namespace itmc
