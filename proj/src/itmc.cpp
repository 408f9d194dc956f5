#include "itmc/itmc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include <omp.h>

#include "itmc/errors.hpp"
#include "itmc/stats.hpp"

namespace itmc {

double two_sided_pvalue(std::span<const double> simulated, double observed) {
  const TailFractions f = empirical_tail_fractions(simulated, observed);
  return std::min(1.0, 2.0 * std::min(f.frac_ge, f.frac_le));
}

double two_sided_pvalue(std::span<const double> simulated, std::span<const double> probabilities, double observed) {
  if (simulated.empty()) throw InvalidArgument("two_sided_pvalue: empty replicate set");
  if (simulated.size() != probabilities.size()) throw InvalidArgument("two_sided_pvalue: one probability per replicate");
  double ge = 0.0;
  double le = 0.0;
  for (std::size_t j = 0; j < simulated.size(); ++j) {
    if (simulated[j] >= observed) ge += probabilities[j];
    if (simulated[j] <= observed) le += probabilities[j];
  }
  return std::min(1.0, 2.0 * std::min(ge, le));
}

void summarize(ItmcResult& result) {
  const auto& rho = result.per_draw_rho;
  const auto& w = result.weights;
  double mean = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) mean += w[i] * rho[i];
  double var = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) var += w[i] * (rho[i] - mean) * (rho[i] - mean);
  result.rho_star = mean;
  result.dispersion = std::sqrt(var);
}

namespace {

struct Grid {
  std::size_t draws;
  std::size_t reps;  // M; column M holds the observed record
  std::size_t cells() const { return draws * (reps + 1); }
};

void check_run_args(const Trajectory& observed, std::size_t num_draws, std::size_t num_replications) {
  validate_trajectory(observed);
  if (num_draws == 0) throw InvalidArgument("itmc_run: need at least one parameter draw");
  if (num_replications < kMinReplications) {
    throw InvalidArgument("itmc_run: need at least " + std::to_string(kMinReplications) + " replications");
  }
}

// Stream layout shared by the serial and parallel paths.
RngStream draw_stream(const RngStream& rng) { return rng.substream(~std::uint64_t{0}); }

double cell_surprisal(const GenerativeModel& model, const ParamVector& theta, const Trajectory& observed,
                      const Grid& grid, std::size_t i, std::size_t j, const RngStream& rng) {
  const RngStream cell = rng.substream(i * (grid.reps + 1) + j);
  if (j == grid.reps) return model.surprisal(theta, observed, cell.substream(1));
  const Trajectory replicate = model.simulate(theta, observed.inputs, observed.size(), cell.substream(0));
  return model.surprisal(theta, replicate, cell.substream(1));
}

ItmcResult reduce(const GenerativeModel& model, const PosteriorDraws& draws, const Grid& grid,
                  const std::vector<double>& surprisals, const RngStream& rng) {
  ItmcResult result;
  result.num_draws = grid.draws;
  result.num_replications = grid.reps;
  result.rng = rng;
  result.surprisal_estimated = model.surprisal_is_estimated();
  result.weights = draws.weights();
  result.per_draw_rho.resize(grid.draws);
  result.surprisal_obs.resize(grid.draws);
  for (std::size_t i = 0; i < grid.draws; ++i) {
    const double* row = surprisals.data() + i * (grid.reps + 1);
    result.surprisal_obs[i] = row[grid.reps];
    result.per_draw_rho[i] = two_sided_pvalue(std::span<const double>(row, grid.reps), row[grid.reps]);
  }
  summarize(result);
  return result;
}

[[noreturn]] void rethrow_annotated(std::exception_ptr error, std::size_t draw) {
  try {
    std::rethrow_exception(error);
  } catch (const std::exception& e) {
    throw std::runtime_error("itmc_run: draw " + std::to_string(draw) + ": " + e.what());
  }
}

PosteriorDraws sample_draws(const PosteriorSampler& sampler, std::size_t n, const RngStream& rng) {
  PosteriorDraws draws = sampler.draw(n, draw_stream(rng));
  if (draws.size() != n) throw InvalidArgument("itmc_run: sampler returned the wrong number of draws");
  return draws;
}

}  // namespace

ItmcResult itmc_run(const GenerativeModel& model, const PosteriorSampler& sampler, const Trajectory& observed,
                    std::size_t num_draws, std::size_t num_replications, const RngStream& rng,
                    const ItmcOptions& options) {
  check_run_args(observed, num_draws, num_replications);
  const PosteriorDraws draws = sample_draws(sampler, num_draws, rng);
  const Grid grid{num_draws, num_replications};
  const auto cells = static_cast<std::ptrdiff_t>(grid.cells());
  std::vector<double> surprisals(grid.cells());
  std::vector<std::exception_ptr> errors(grid.cells());
  const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t k = 0; k < cells; ++k) {
    const auto cell = static_cast<std::size_t>(k);
    const std::size_t i = cell / (grid.reps + 1);
    const std::size_t j = cell % (grid.reps + 1);
    try {
      surprisals[cell] = cell_surprisal(model, draws[i], observed, grid, i, j, rng);
    } catch (...) {
      errors[cell] = std::current_exception();
    }
  }

  for (std::size_t cell = 0; cell < errors.size(); ++cell) {
    if (errors[cell]) rethrow_annotated(errors[cell], cell / (grid.reps + 1));
  }
  return reduce(model, draws, grid, surprisals, rng);
}

ItmcResult itmc_run_serial(const GenerativeModel& model, const PosteriorSampler& sampler,
                           const Trajectory& observed, std::size_t num_draws, std::size_t num_replications,
                           const RngStream& rng) {
  check_run_args(observed, num_draws, num_replications);
  const PosteriorDraws draws = sample_draws(sampler, num_draws, rng);
  const Grid grid{num_draws, num_replications};
  std::vector<double> surprisals(grid.cells());
  for (std::size_t i = 0; i < grid.draws; ++i) {
    for (std::size_t j = 0; j <= grid.reps; ++j) {
      try {
        surprisals[i * (grid.reps + 1) + j] = cell_surprisal(model, draws[i], observed, grid, i, j, rng);
      } catch (...) {
        rethrow_annotated(std::current_exception(), i);
      }
    }
  }
  return reduce(model, draws, grid, surprisals, rng);
}

ItmcResult itmc_run_exhaustive(const EnumerableModel& model, const PosteriorSampler& sampler,
                               const Trajectory& observed, std::size_t num_draws, const RngStream& rng) {
  validate_trajectory(observed);
  if (num_draws == 0) throw InvalidArgument("itmc_run_exhaustive: need at least one parameter draw");
  const PosteriorDraws draws = sample_draws(sampler, num_draws, rng);

  ItmcResult result;
  result.num_draws = num_draws;
  result.rng = rng;
  result.weights = draws.weights();
  result.per_draw_rho.resize(num_draws);
  result.surprisal_obs.resize(num_draws);
  for (std::size_t i = 0; i < num_draws; ++i) {
    const auto space = model.enumerate(draws[i], observed.inputs, observed.size());
    std::vector<double> surprisal(space.size());
    std::vector<double> prob(space.size());
    for (std::size_t j = 0; j < space.size(); ++j) {
      surprisal[j] = model.surprisal(draws[i], space[j].trajectory, rng);
      prob[j] = space[j].probability;
    }
    result.num_replications = space.size();
    result.surprisal_obs[i] = model.surprisal(draws[i], observed, rng);
    result.per_draw_rho[i] = two_sided_pvalue(surprisal, prob, result.surprisal_obs[i]);
  }
  summarize(result);
  return result;
}

std::vector<CumulativePoint> itmc_cumulative(const GenerativeModel& model, const SamplerFactory& sampler_factory,
                                             const Trajectory& observed, std::size_t num_draws,
                                             std::size_t num_replications, std::size_t stride, const RngStream& rng,
                                             const ItmcOptions& options) {
  if (stride == 0) throw InvalidArgument("itmc_cumulative: stride must be positive");
  validate_trajectory(observed);
  std::vector<CumulativePoint> trace;
  for (std::size_t t = stride; t <= observed.size(); t += stride) {
    const Trajectory prefix = observed.prefix(t);
    const auto sampler = sampler_factory(prefix);
    trace.push_back({t, itmc_run(model, *sampler, prefix, num_draws, num_replications, rng, options)});
  }
  return trace;
}

}  // namespace itmc
