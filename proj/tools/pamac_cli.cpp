// Command-line front end: single-trial simulation with a full audit record,
// Monte Carlo sweeps over blocklength grids, the built-in property suite,
// and analytic bound reports for a given configuration.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "pamac/channel.hpp"
#include "pamac/codec_timeshare.hpp"
#include "pamac/experiment.hpp"
#include "pamac/model.hpp"
#include "pamac/selfcheck.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  std::int64_t trials = 0;
  std::string out;
  std::string trace;
  int workers = 1;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_trials = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_trace = nullptr;
  CLI::Option* o_workers = nullptr;
};

void add_common_options(CLI::App* cmd, CommonOptions* opts) {
  cmd->add_option("-c,--config", opts->config_path, "experiment configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  opts->o_seed = cmd->add_option("--seed", opts->seed, "override the master seed");
  opts->o_trials = cmd->add_option("--trials", opts->trials, "override the trial count");
  opts->o_out = cmd->add_option("--out", opts->out, "override the CSV output path");
  opts->o_trace = cmd->add_option("--trace", opts->trace, "override the trace dump path");
  opts->o_workers = cmd->add_option("--workers", opts->workers, "override the worker count");
}

pamac::ExperimentConfig load_config(const CommonOptions& opts) {
  std::ifstream in(opts.config_path);
  if (!in) throw std::runtime_error("cannot open config file " + opts.config_path);
  nlohmann::json j;
  in >> j;
  if (*opts.o_seed) j["seed"] = opts.seed;
  if (*opts.o_trials) j["trials"] = opts.trials;
  if (*opts.o_out) j["out"] = opts.out;
  if (*opts.o_trace) j["trace"] = opts.trace;
  if (*opts.o_workers) j["workers"] = opts.workers;
  return pamac::config_from_json(j);
}

std::string join(const std::vector<double>& v) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    std::snprintf(buf, sizeof buf, "%.6g", v[i]);
    out += buf;
  }
  return out;
}

int run_simulate(const CommonOptions& opts, std::int64_t n_override, std::int64_t trial_index) {
  const pamac::ExperimentConfig config = load_config(opts);
  const std::int64_t n = n_override > 0 ? n_override : config.blocklengths.front();
  nlohmann::json record;
  const pamac::TrialOutcome outcome = pamac::run_trial_verbose(config, n, trial_index, &record);
  std::cout << record.dump(2) << '\n';
  return outcome.correct ? 0 : 1;
}

int run_sweep_cmd(const CommonOptions& opts) {
  const pamac::ExperimentConfig config = load_config(opts);
  const pamac::SweepResult result = pamac::run_sweep(config);
  if (config.output_path.empty()) {
    std::cout << pamac::sweep_csv(config, result);
  } else {
    std::cout << "wrote " << result.rows.size() << " rows to " << config.output_path << '\n';
  }
  for (const pamac::SweepRow& row : result.rows) {
    std::cerr << "n=" << row.n << ": " << row.errors << '/' << row.trials
              << " errors (rate " << row.error_rate << ", wilson [" << row.wilson_lo << ", "
              << row.wilson_hi << "], " << row.wall_seconds << " s)\n";
  }
  std::cerr << "error rate strictly decreasing across the grid: "
            << (result.error_rate_strictly_decreasing ? "yes" : "no") << '\n';
  return 0;
}

int run_verify(std::uint64_t seed) {
  bool all_ok = true;
  for (const pamac::CheckResult& check : pamac::run_selfchecks(seed)) {
    std::cout << (check.ok ? "[ok]   " : "[FAIL] ") << check.name << " — " << check.detail
              << '\n';
    all_ok = all_ok && check.ok;
  }
  std::cout << (all_ok ? "all checks passed\n" : "some checks FAILED\n");
  return all_ok ? 0 : 1;
}

int run_bounds(const CommonOptions& opts) {
  const pamac::ExperimentConfig config = load_config(opts);
  const pamac::ChannelSpec& spec = config.channel;
  const double threshold = spec.d * (spec.p - 1) / 2.0;
  std::cout << "scheme " << pamac::to_string(config.scheme) << ", d=" << spec.d
            << ", p=" << spec.p << ", q=" << spec.q << '\n';
  std::cout << "sum rate " << config.rates.sum() << " vs threshold " << threshold << " -> "
            << pamac::to_string(pamac::rate_region_check(config.rates, spec.d, spec.p)) << '\n';
  const pamac::ChannelValidation validation = pamac::validate_channel(spec);
  std::cout << "channel sigma_min = " << validation.sigma_min << '\n';

  for (std::int64_t n : config.blocklengths) {
    std::cout << "n=" << n << ":\n";
    if (config.scheme == pamac::Scheme::root) {
      std::string sizes;
      std::vector<double> effective;
      for (double r : config.rates.R) {
        const int size = pamac::root_codebook_size(r, n);
        if (!sizes.empty()) sizes += ", ";
        sizes += std::to_string(size);
        effective.push_back(std::log(static_cast<double>(size)) /
                            std::log(static_cast<double>(n)));
      }
      std::cout << "  codebook sizes = [" << sizes << "]\n";
      std::cout << "  effective rates = [" << join(effective) << "]\n";
    } else {
      const pamac::TimeShareLayout layout = pamac::build_layout(n, spec.d, spec.p, config.rates);
      std::string m, rho, sub;
      for (std::size_t i = 0; i < layout.m.size(); ++i) {
        if (i) {
          m += ", ";
          rho += ", ";
          sub += ", ";
        }
        m += std::to_string(layout.m[i]);
        rho += layout.rho[i].str();
        sub += std::to_string(layout.sub_sizes[i]);
      }
      std::cout << "  granularities m = [" << m << "]\n";
      std::cout << "  proportions rho = [" << rho << "]\n";
      std::cout << "  subsegment sizes = [" << sub << "] per segment of " << layout.segment_len
                << '\n';
      std::cout << "  effective rates = [" << join(layout.effective_rates) << "]\n";
    }
    const double tau = std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(n));
    std::cout << "  union envelope 2q/n^2 = " << pamac::analytic_error_envelope(spec, n) << '\n';
    std::cout << "  hoeffding(n, sqrt(log n / n)) = " << pamac::hoeffding_bound(n, tau) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"permutation-adder multiple-access channel simulator"};
  app.require_subcommand(1);

  CommonOptions sim_opts;
  std::int64_t sim_n = 0;
  std::int64_t sim_trial = 0;
  CLI::App* simulate = app.add_subcommand("simulate", "run one trial and dump the full record");
  add_common_options(simulate, &sim_opts);
  simulate->add_option("--n", sim_n, "blocklength (default: first in the config)");
  simulate->add_option("--trial", sim_trial, "trial index within the seeded stream");

  CommonOptions sweep_opts;
  CLI::App* sweep = app.add_subcommand("sweep", "run the Monte Carlo sweep from a config");
  add_common_options(sweep, &sweep_opts);

  std::uint64_t verify_seed = 20260815;
  CLI::App* verify = app.add_subcommand("verify", "run the built-in property suite");
  verify->add_option("--seed", verify_seed, "seed for the randomized checks");

  CommonOptions bounds_opts;
  CLI::App* bounds = app.add_subcommand("bounds", "print the analytic quantities for a config");
  add_common_options(bounds, &bounds_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(sim_opts, sim_n, sim_trial);
    if (sweep->parsed()) return run_sweep_cmd(sweep_opts);
    if (verify->parsed()) return run_verify(verify_seed);
    if (bounds->parsed()) return run_bounds(bounds_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
