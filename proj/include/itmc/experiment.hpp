#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "itmc/model.hpp"

namespace itmc {

enum class Method { Itmc, LjungBox, Smw };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);

/// Settings of one experiment. Keys in config files and --set flags use the
/// names listed next to each field.
struct ExperimentConfig {
  std::string experiment = "case-i";      // experiment: case-i..case-v, watertank-synthetic, watertank-data, custom
  std::size_t length = 100;               // T
  std::size_t replications = 100;         // replications
  std::size_t draws = 20;                 // N
  std::size_t replicates = 50;            // M
  std::uint64_t seed = 1;                 // seed
  std::vector<Method> methods{Method::Itmc, Method::LjungBox};  // methods (comma list)
  std::filesystem::path output = "out";   // output
  std::size_t stride = 10;                // stride (cumulative traces)
  double prior_mean = 0.0;                // prior_mean (AR coefficient)
  double prior_var = 1.0;                 // prior_var
  std::size_t order = 1;                  // order (custom AR checks)
  double sigma2 = 1.0;                    // sigma2 (custom AR checks)
  std::size_t lags = 0;                   // lags (0: max(order+1, round(ln T)))
  // State-space experiments.
  std::size_t particles = 200;            // particles (surprisal filter)
  std::size_t pgas_particles = 20;        // pgas_particles
  std::size_t chain_iterations = 1000;    // chain_iterations
  std::size_t burn_in = 500;              // burn_in
  double dt = 4.0;                        // dt
  std::size_t datasets = 6;               // datasets (synthetic water-tank sets)
  std::size_t corrupted_datasets = 0;     // corrupted_datasets (noise variances x10 at generation)
  std::string variant = "extended";       // variant: extended | original
  std::filesystem::path input;            // input (CSV)
  std::string u_column = "u";             // u_column
  std::string y_column = "y";             // y_column
  int threads = 0;                        // threads (0: all cores)
};

/// Applies one key=value setting; throws ConfigError for unknown keys or
/// malformed values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Reads a plain-text key=value file ('#' starts a comment) on top of `base`.
ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base = {});

/// CHECK_THREADS and CHECK_SEED, when set.
void apply_environment(ExperimentConfig& config);

void validate(const ExperimentConfig& config);

struct ResultRecord {
  std::string experiment;
  std::size_t replication = 0;
  Method method = Method::Itmc;
  double statistic = 0.0;   // ITMC: mean observed surprisal; Ljung-Box: Q; z-test: z
  double value = 0.0;       // rho_star or p-value
  double dispersion = 0.0;  // ITMC only
  std::uint64_t seed = 0;
  double wall_time = 0.0;   // seconds; reported in timing.csv only
  std::string error;        // nonempty for failed (replication, method) pairs
};

struct ExperimentOutput {
  std::vector<ResultRecord> records;
  std::vector<std::filesystem::path> files;
};

/// Replication sweep over a synthetic AR case (or one custom CSV record).
/// Writes results.csv, hist_<method>.csv, summary.json and timing.csv.
ExperimentOutput run_experiment(const ExperimentConfig& config);

struct TraceRow {
  std::size_t t = 0;
  double rho_star = 0.0;
  double lower = 0.0;  // rho_star - 2 dispersion
  double upper = 0.0;  // rho_star + 2 dispersion
  double y = 0.0;
};

/// Cumulative ITMC trace over prefixes of one record; writes trace.csv.
std::vector<TraceRow> run_cumulative(const ExperimentConfig& config);

/// Water-tank check on synthetic sets or a CSV record; writes the same file
/// set as run_experiment plus data_<k>.csv for every data set.
ExperimentOutput run_watertank(const ExperimentConfig& config);

/// 10 equal bins on [0, 1]; the value 1 falls in the last bin.
std::vector<std::size_t> histogram_counts(const std::vector<double>& values);

}  // namespace itmc
