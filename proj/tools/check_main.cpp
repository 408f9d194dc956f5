// check: command-line front end for the model-check library.
//
//   check run <config>          replication sweep (results.csv, hist_*.csv, summary.json)
//   check cumulative <config>   cumulative ITMC trace (trace.csv)
//   check watertank <config>    water-tank check on synthetic sets or a CSV record
//   check ljungbox --input <csv> --order p --h <int>

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "itmc/errors.hpp"
#include "itmc/experiment.hpp"
#include "itmc/ljung_box.hpp"
#include "itmc/timeseries_csv.hpp"

namespace {

struct ConfigArgs {
  std::string file;
  std::vector<std::string> settings;
};

void add_config_args(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("config", args.file, "key=value experiment configuration file")->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", args.settings, "override a setting, e.g. --set T=1000 (repeatable)");
}

itmc::ExperimentConfig resolve(const ConfigArgs& args) {
  itmc::ExperimentConfig config;
  if (!args.file.empty()) config = itmc::load_config_file(args.file);
  itmc::apply_environment(config);
  for (const auto& s : args.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw itmc::ConfigError("--set expects key=value, got '" + s + "'");
    itmc::apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
  }
  return config;
}

void report(const itmc::ExperimentOutput& out) {
  std::size_t failed = 0;
  for (const auto& r : out.records) failed += r.error.empty() ? 0 : 1;
  std::cout << out.records.size() << " records";
  if (failed > 0) std::cout << " (" << failed << " failed)";
  std::cout << '\n';
  for (const auto& f : out.files) std::cout << "  " << f.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-theoretic model checks for time-series model classes"};
  app.require_subcommand(1);

  ConfigArgs run_args;
  auto* run = app.add_subcommand("run", "replication sweep over a synthetic AR case or a custom record");
  add_config_args(run, run_args);

  ConfigArgs cumulative_args;
  auto* cumulative = app.add_subcommand("cumulative", "ITMC trace over growing prefixes of one record");
  add_config_args(cumulative, cumulative_args);

  ConfigArgs tank_args;
  auto* tank = app.add_subcommand("watertank", "check the cascaded water-tank model class");
  add_config_args(tank, tank_args);

  std::string lb_input;
  std::string lb_column = "y";
  std::size_t lb_order = 1;
  std::size_t lb_lags = 0;
  auto* lb = app.add_subcommand("ljungbox", "Ljung-Box whiteness test of AR(p) prediction errors");
  lb->set_help_flag("--help", "Print this help message and exit");  // frees -h for the lag count
  lb->add_option("--input", lb_input, "CSV file with a header row")->required()->check(CLI::ExistingFile);
  lb->add_option("--order", lb_order, "AR order p")->check(CLI::PositiveNumber);
  lb->add_option("--h", lb_lags, "number of lags (default max(p+1, round(ln T)))");
  lb->add_option("--column", lb_column, "observation column name");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      report(itmc::run_experiment(resolve(run_args)));
    } else if (cumulative->parsed()) {
      const auto config = resolve(cumulative_args);
      const auto rows = itmc::run_cumulative(config);
      std::cout << rows.size() << " trace rows\n  " << (config.output / "trace.csv").string() << '\n';
    } else if (tank->parsed()) {
      report(itmc::run_watertank(resolve(tank_args)));
    } else if (lb->parsed()) {
      const auto y = itmc::load_timeseries_csv(lb_input, "", lb_column);
      const auto res = itmc::ljung_box_for_ar(y, lb_order, lb_lags);
      nlohmann::ordered_json j;
      j["T"] = y.size();
      j["order"] = lb_order;
      j["h"] = res.lags;
      j["Q"] = res.q;
      j["p_value"] = res.p_value;
      j["autocorrelations"] = res.autocorrelations;
      std::cout << j.dump(2) << '\n';
    }
  } catch (const itmc::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
