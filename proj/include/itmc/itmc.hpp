#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "itmc/model.hpp"
#include "itmc/rng.hpp"

namespace itmc {

/// Minimum replication count accepted by itmc_run. With continuous
/// surprisals a handful of replicates biases the per-draw p-value toward 0
/// (M = 1 always yields 0).
inline constexpr std::size_t kMinReplications = 20;

/// min(1, 2 min(P(D >= D_obs), P(D <= D_obs))) from simulated surprisals,
/// ties counted on both sides.
double two_sided_pvalue(std::span<const double> simulated, double observed);

/// Weighted form for enumerated replicate spaces: `probabilities[j]` is the
/// probability of the replicate with surprisal `simulated[j]`.
double two_sided_pvalue(std::span<const double> simulated, std::span<const double> probabilities, double observed);

struct ItmcResult {
  double rho_star = 0.0;
  double dispersion = 0.0;
  std::vector<double> per_draw_rho;
  std::vector<double> surprisal_obs;  // surprisal of the observed record under each draw
  std::vector<double> weights;
  std::size_t num_draws = 0;
  std::size_t num_replications = 0;
  RngStream rng;
  bool surprisal_estimated = false;
};

/// Weighted mean of the per-draw p-values and their weighted RMS deviation.
void summarize(ItmcResult& result);

struct ItmcOptions {
  /// 0 uses the OpenMP default (all available workers).
  int threads = 0;
};

/// Monte Carlo information-theoretic model check.
///
/// Draws `num_draws` parameters from `sampler`, simulates
/// `num_replications` records per draw (reusing the observed input
/// sequence), and compares their surprisals with that of `observed`. The
/// (draw, replicate) grid runs in parallel; every cell owns the substream
/// i (M + 1) + j of `rng` (j = M for the observed record), and reductions
/// happen in a fixed order, so the result does not depend on the thread
/// count.
ItmcResult itmc_run(const GenerativeModel& model, const PosteriorSampler& sampler, const Trajectory& observed,
                    std::size_t num_draws, std::size_t num_replications, const RngStream& rng,
                    const ItmcOptions& options = {});

/// Single-threaded reference of itmc_run, kept for testing and benchmarks.
/// Produces bitwise-identical results.
ItmcResult itmc_run_serial(const GenerativeModel& model, const PosteriorSampler& sampler,
                           const Trajectory& observed, std::size_t num_draws, std::size_t num_replications,
                           const RngStream& rng);

struct WeightedTrajectory {
  Trajectory trajectory;
  double probability = 0.0;
};

/// A generative model whose replicate space can be listed exhaustively.
class EnumerableModel : public GenerativeModel {
 public:
  virtual std::vector<WeightedTrajectory> enumerate(const ParamVector& theta, std::span<const double> inputs,
                                                    std::size_t length) const = 0;
};

/// itmc_run with the replicate expectation evaluated exactly over the whole
/// replicate space instead of by simulation.
ItmcResult itmc_run_exhaustive(const EnumerableModel& model, const PosteriorSampler& sampler,
                               const Trajectory& observed, std::size_t num_draws, const RngStream& rng);

using SamplerFactory = std::function<std::unique_ptr<PosteriorSampler>(const Trajectory&)>;

struct CumulativePoint {
  std::size_t t = 0;
  ItmcResult result;
};

/// itmc_run on the prefixes of length stride, 2 stride, ..., with the
/// sampler rebuilt from each prefix. Every prefix reuses `rng`.
std::vector<CumulativePoint> itmc_cumulative(const GenerativeModel& model, const SamplerFactory& sampler_factory,
                                             const Trajectory& observed, std::size_t num_draws,
                                             std::size_t num_replications, std::size_t stride, const RngStream& rng,
                                             const ItmcOptions& options = {});

}  // namespace itmc
