#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "itmc/rng.hpp"

namespace itmc {

/// An observed or simulated data record, optionally paired with the exogenous
/// input sequence that drove it.
struct Trajectory {
  std::vector<double> observations;
  std::vector<double> inputs;  // empty when the record has no inputs

  std::size_t size() const { return observations.size(); }
  bool has_inputs() const { return !inputs.empty(); }

  /// First `length` samples (observations and inputs alike).
  Trajectory prefix(std::size_t length) const;
};

/// Returns `t` unchanged when every entry is finite and lengths agree;
/// throws InvalidData otherwise.
const Trajectory& validate_trajectory(const Trajectory& t);

/// A point in the parameter space of a model class. Always nonempty and finite.
class ParamVector {
 public:
  explicit ParamVector(std::vector<double> values);
  ParamVector(std::initializer_list<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  std::vector<double> values_;
};

/// Samples from the weight function over the parameter space, with
/// normalized weights.
class PosteriorDraws {
 public:
  /// Equally weighted draws.
  explicit PosteriorDraws(std::vector<ParamVector> draws);
  /// Weighted draws; weights are normalized here and must be nonnegative
  /// with a positive sum.
  PosteriorDraws(std::vector<ParamVector> draws, std::vector<double> weights);

  std::size_t size() const { return draws_.size(); }
  const ParamVector& operator[](std::size_t i) const { return draws_[i]; }
  const std::vector<ParamVector>& draws() const { return draws_; }
  const std::vector<double>& weights() const { return weights_; }
  bool equally_weighted() const { return equal_; }

 private:
  std::vector<ParamVector> draws_;
  std::vector<double> weights_;
  bool equal_ = true;
};

/// A parametric model class viewed as a data generator.
///
/// Implementations hold no mutable state, so concurrent calls with distinct
/// streams are safe. surprisal() receives a stream because state-space
/// classes can only estimate the likelihood; exact classes ignore it.
class GenerativeModel {
 public:
  virtual ~GenerativeModel() = default;

  virtual std::size_t param_dim() const = 0;

  /// Simulates `length` samples. `inputs` is either empty or of length `length`
  /// and is copied into the returned trajectory.
  virtual Trajectory simulate(const ParamVector& theta, std::span<const double> inputs,
                              std::size_t length, const RngStream& rng) const = 0;

  /// -ln p(y | theta), exact or estimated.
  virtual double surprisal(const ParamVector& theta, const Trajectory& y,
                           const RngStream& rng) const = 0;

  virtual bool surprisal_is_estimated() const { return false; }
};

class PosteriorSampler {
 public:
  virtual ~PosteriorSampler() = default;
  virtual PosteriorDraws draw(std::size_t n, const RngStream& rng) const = 0;
};

}  // namespace itmc
