/// Seeded Monte Carlo harness: experiment configuration, trial execution,
/// multi-worker sweeps with bitwise-reproducible aggregation, analytic bound
/// calculators, and CSV output.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pamac/codec_root.hpp"
#include "pamac/codec_timeshare.hpp"
#include "pamac/model.hpp"

namespace pamac {

enum class Scheme { root, timeshare, timeshare_binary };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

/// Everything one sweep needs.  The channel is either the mixing family
/// (epsilon set) or an explicit matrix; scheme `root` and `timeshare_binary`
/// require p = 2.
struct ExperimentConfig {
  Scheme scheme = Scheme::timeshare;
  ChannelSpec channel;
  RateTuple rates;
  std::vector<std::int64_t> blocklengths;
  std::int64_t trials = 0;
  std::uint64_t master_seed = 0;
  std::string output_path;       ///< CSV destination; empty = don't write
  std::string trace_path;        ///< per-trial record dump; empty = off
  int workers = 1;
  bool skip_permutation = false;
  bool exhaustive = false;       ///< enumerate all message tuples instead of sampling

  /// Throws std::invalid_argument on scheme/parameter mismatches.
  void validate() const;
};

/// Reads a config from JSON keys: scheme, d, p, rates, blocklengths,
/// epsilon | matrix, trials, seed, out, trace, workers, skip_permutation,
/// exhaustive.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// One aggregated grid point of a sweep.
struct SweepRow {
  std::int64_t n = 0;
  std::int64_t trials = 0;
  std::int64_t errors = 0;
  double error_rate = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 1.0;
  std::vector<double> effective_rates;        ///< realized per-sender rates
  std::vector<std::int64_t> sender_errors;    ///< per-sender wrong-message counts
  double envelope = 0.0;                      ///< analytic reference curve at this n
  double wall_seconds = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  ///< one per blocklength, in config order
  bool error_rate_strictly_decreasing = false;  ///< trend across the n grid
};

/// Codebook size the sweep harness gives a root-scheme sender at blocklength
/// n: max(2, round(n^rate)), so the realized rate log(size)/log(n) tracks the
/// requested one as closely as an integer size allows.
int root_codebook_size(double rate, std::int64_t n);

/// Outcome of a single trial.
struct TrialOutcome {
  bool correct = false;
  std::vector<bool> sender_correct;  ///< per-sender message equality
};

/// Runs exactly one trial: samples uniform messages, encodes all senders,
/// transmits, decodes, and compares the full message tuple.  All randomness
/// is derived from (master_seed, n, trial_index), so the verdict is a pure
/// function of those three values regardless of what else ran.
TrialOutcome run_trial(const ExperimentConfig& config, std::int64_t n, std::int64_t trial_index);

/// run_trial plus a full audit record: sampled messages, every pipeline
/// intermediate (x, w, z, y, sigma), and the decoder's decision variables,
/// as JSON.  Same determinism contract as run_trial.
TrialOutcome run_trial_verbose(const ExperimentConfig& config, std::int64_t n,
                               std::int64_t trial_index, nlohmann::json* trace);

/// Runs trials × blocklengths trials (split across config.workers threads),
/// aggregates integer error counts in a scheduling-independent way, writes
/// the CSV when output_path is set, and reports the decay trend.  With
/// exhaustive mode the trial count per n becomes the full message-tuple
/// count.  Trace dumps require workers == 1.
SweepResult run_sweep(const ExperimentConfig& config);

/// Two-sided Hoeffding tail for a [0,1]-bounded sample mean: 2·exp(−2nτ²).
double hoeffding_bound(std::int64_t n, double tau);

/// Union-of-Hoeffding envelope 2·q/n² for the event that any entry of the
/// empirical output distribution strays by more than sqrt(log n / n).  Valid
/// as a guarantee only at asymptotically large n; reported alongside sweeps
/// as a reference curve, never as a promise at desk-scale n.
double analytic_error_envelope(const ChannelSpec& spec, std::int64_t n);

/// 95% Wilson score interval for `errors` successes in `trials` draws.
/// Degenerates to [0, 1] when trials = 0.
void wilson_interval(std::int64_t errors, std::int64_t trials, double* lo, double* hi);

/// Renders the sweep as CSV with the fixed header
/// scheme,d,p,n,rates,effective_rates,epsilon,trials,errors,error_rate,
/// wilson_lo,wilson_hi,seed,envelope — doubles with 12 significant digits,
/// rate tuples joined with ';'.
std::string sweep_csv(const ExperimentConfig& config, const SweepResult& result);

}  // namespace pamac
