#include "itmc/model.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "itmc/errors.hpp"

namespace itmc {

Trajectory Trajectory::prefix(std::size_t length) const {
  if (length > observations.size()) throw InvalidArgument("Trajectory::prefix: length exceeds record");
  Trajectory out;
  out.observations.assign(observations.begin(), observations.begin() + static_cast<std::ptrdiff_t>(length));
  if (has_inputs()) out.inputs.assign(inputs.begin(), inputs.begin() + static_cast<std::ptrdiff_t>(length));
  return out;
}

const Trajectory& validate_trajectory(const Trajectory& t) {
  if (t.observations.empty()) throw InvalidData("trajectory has no observations");
  if (t.has_inputs() && t.inputs.size() != t.observations.size()) {
    throw InvalidData("trajectory inputs have length " + std::to_string(t.inputs.size()) +
                      " but observations have length " + std::to_string(t.observations.size()));
  }
  for (std::size_t i = 0; i < t.observations.size(); ++i) {
    if (!std::isfinite(t.observations[i])) throw InvalidData("non-finite observation at index " + std::to_string(i));
  }
  for (std::size_t i = 0; i < t.inputs.size(); ++i) {
    if (!std::isfinite(t.inputs[i])) throw InvalidData("non-finite input at index " + std::to_string(i));
  }
  return t;
}

ParamVector::ParamVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidArgument("ParamVector: dimension must be at least 1");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("ParamVector: entries must be finite");
  }
}

ParamVector::ParamVector(std::initializer_list<double> values) : ParamVector(std::vector<double>(values)) {}

PosteriorDraws::PosteriorDraws(std::vector<ParamVector> draws) : draws_(std::move(draws)) {
  if (draws_.empty()) throw InvalidArgument("PosteriorDraws: need at least one draw");
  weights_.assign(draws_.size(), 1.0 / static_cast<double>(draws_.size()));
}

PosteriorDraws::PosteriorDraws(std::vector<ParamVector> draws, std::vector<double> weights)
    : draws_(std::move(draws)), weights_(std::move(weights)), equal_(false) {
  if (draws_.empty()) throw InvalidArgument("PosteriorDraws: need at least one draw");
  if (weights_.size() != draws_.size()) throw InvalidArgument("PosteriorDraws: one weight per draw required");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("PosteriorDraws: weights must be finite and nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgument("PosteriorDraws: weights sum to zero");
  for (double& w : weights_) w /= total;
}

}  // namespace itmc
