#include "pamac/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "pamac/channel.hpp"

namespace pamac {

namespace {

constexpr double kWilsonZ = 1.959963984540054;      // 97.5% normal quantile
constexpr std::int64_t kExhaustiveCap = 10000000;   // refuse absurd exhaustive runs

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string join_rates(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += format_double(values[i]);
  }
  return out;
}

/// Per-blocklength immutable state shared by all workers.
struct TrialContext {
  std::int64_t n = 0;
  // Root scheme.
  RootCodebook codebook;
  DenseMatrix kernel_inverse;
  // Time-sharing schemes.
  TimeShareLayout layout;
  DecoderMatrices matrices;
  // Message-space sizes per sampling slot (root: one per sender; timeshare:
  // one per sender×segment, sender-major).
  std::vector<int> slot_sizes;
  std::int64_t exhaustive_total = 1;
};

TrialContext make_context(const ExperimentConfig& config, std::int64_t n) {
  TrialContext ctx;
  ctx.n = n;
  const int d = config.channel.d;
  if (config.scheme == Scheme::root) {
    std::vector<int> sizes;
    for (double rate : config.rates.R) sizes.push_back(root_codebook_size(rate, n));
    ctx.codebook = build_root_codebook(d, sizes);
    ctx.kernel_inverse = invert(config.channel.P);
    ctx.slot_sizes = sizes;
  } else {
    ctx.layout = build_layout(n, d, config.channel.p, config.rates);
    if (config.scheme == Scheme::timeshare) {
      ctx.matrices = build_decoder_matrices(config.channel, ctx.layout);
    }
    for (int i = 0; i < d; ++i) {
      const std::int64_t size = ctx.layout.lattices[static_cast<std::size_t>(i)].size();
      for (int c = 0; c < d; ++c) ctx.slot_sizes.push_back(static_cast<int>(size));
    }
  }
  ctx.exhaustive_total = 1;
  for (int s : ctx.slot_sizes) {
    if (ctx.exhaustive_total > kExhaustiveCap / s) {
      ctx.exhaustive_total = kExhaustiveCap + 1;  // flagged as too large
      break;
    }
    ctx.exhaustive_total *= s;
  }
  return ctx;
}

/// Draws (or unranks, in exhaustive mode) the message for every sampling
/// slot.
std::vector<std::int64_t> pick_messages(const ExperimentConfig& config, const TrialContext& ctx,
                                        std::uint64_t trial_seed, std::int64_t trial_index) {
  std::vector<std::int64_t> picks(ctx.slot_sizes.size());
  if (config.exhaustive) {
    return mixed_radix_unpack(trial_index, ctx.slot_sizes);
  }
  Rng rng(derive_seed(trial_seed, 1));
  for (std::size_t s = 0; s < picks.size(); ++s) {
    picks[s] = static_cast<std::int64_t>(
        rng.uniform_below(static_cast<std::uint64_t>(ctx.slot_sizes[s])));
  }
  return picks;
}

TrialOutcome run_trial_in_context(const ExperimentConfig& config, const TrialContext& ctx,
                                  std::int64_t trial_index, nlohmann::json* trace) {
  const int d = config.channel.d;
  const std::uint64_t trial_seed =
      derive_seed(config.master_seed, static_cast<std::uint64_t>(ctx.n),
                  static_cast<std::uint64_t>(trial_index));
  const std::vector<std::int64_t> picks = pick_messages(config, ctx, trial_seed, trial_index);

  std::vector<Codeword> x(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    Rng enc_rng(derive_seed(trial_seed, 2, static_cast<std::uint64_t>(i)));
    if (config.scheme == Scheme::root) {
      const double theta = ctx.codebook.grid_values[static_cast<std::size_t>(i)]
                                                   [static_cast<std::size_t>(picks[static_cast<std::size_t>(i)])];
      x[static_cast<std::size_t>(i)] = encode_root(theta, static_cast<int>(ctx.n), enc_rng);
    } else {
      TimeShareMessage msg(static_cast<std::size_t>(d));
      for (int c = 0; c < d; ++c) {
        msg[static_cast<std::size_t>(c)] =
            static_cast<int>(picks[static_cast<std::size_t>(i * d + c)]);
      }
      x[static_cast<std::size_t>(i)] = encode_timeshare(msg, i, ctx.layout, enc_rng);
    }
  }

  Rng dmc_rng(derive_seed(trial_seed, 3));
  Rng perm_rng(derive_seed(trial_seed, 4));
  TransmissionRecord record;
  const Codeword y = transmit(x, config.channel, dmc_rng, perm_rng, config.skip_permutation,
                              trace != nullptr ? &record : nullptr);
  const Distribution p_hat = empirical_distribution(y, config.channel.q);

  TrialOutcome outcome;
  outcome.sender_correct.assign(static_cast<std::size_t>(d), false);
  if (config.scheme == Scheme::root) {
    const RootDecodeResult decoded = decode_root_from_empirical(p_hat, ctx.kernel_inverse, ctx.codebook);
    for (int i = 0; i < d; ++i) {
      outcome.sender_correct[static_cast<std::size_t>(i)] =
          decoded.indices[static_cast<std::size_t>(i)] == picks[static_cast<std::size_t>(i)];
    }
    if (trace != nullptr) {
      (*trace)["decoded_indices"] = decoded.indices;
      (*trace)["decoded_thetas"] = decoded.thetas;
      (*trace)["raw_thetas"] = decoded.raw_thetas;
    }
  } else {
    const TimeShareDecodeResult decoded =
        config.scheme == Scheme::timeshare
            ? decode_timeshare_from_empirical(p_hat, config.channel, ctx.layout, ctx.matrices)
            : decode_timeshare_binary_from_empirical(p_hat, config.channel, ctx.layout);
    for (int i = 0; i < d; ++i) {
      bool ok = true;
      for (int c = 0; c < d; ++c) {
        ok = ok && decoded.message_ranks[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] ==
                       picks[static_cast<std::size_t>(i * d + c)];
      }
      outcome.sender_correct[static_cast<std::size_t>(i)] = ok;
    }
    if (trace != nullptr) {
      (*trace)["decoded_ranks"] = decoded.message_ranks;
      (*trace)["phi_tilde"] = decoded.phi_tilde;
      (*trace)["phi_digits"] = decoded.phi_digits;
      (*trace)["decode_failed"] = decoded.decode_failed;
    }
  }
  outcome.correct = true;
  for (bool ok : outcome.sender_correct) outcome.correct = outcome.correct && ok;

  if (trace != nullptr) {
    (*trace)["trial"] = trial_index;
    (*trace)["n"] = ctx.n;
    (*trace)["messages"] = picks;
    (*trace)["correct"] = outcome.correct;
    (*trace)["sender_correct"] = outcome.sender_correct;
    (*trace)["x"] = record.x;
    (*trace)["w"] = record.w;
    (*trace)["z"] = record.z;
    (*trace)["y"] = record.y;
    (*trace)["sigma"] = record.sigma;
  }
  return outcome;
}

}  // namespace

int root_codebook_size(double rate, std::int64_t n) {
  const double raw = std::exp(rate * std::log(static_cast<double>(n)));
  return static_cast<int>(std::max<std::int64_t>(2, std::llround(raw)));
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::root:
      return "root";
    case Scheme::timeshare:
      return "timeshare";
    default:
      return "timeshare-binary";
  }
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "root") return Scheme::root;
  if (name == "timeshare") return Scheme::timeshare;
  if (name == "timeshare-binary") return Scheme::timeshare_binary;
  throw std::invalid_argument("unknown scheme '" + name +
                              "' (expected root, timeshare, or timeshare-binary)");
}

void ExperimentConfig::validate() const {
  const ChannelValidation report = validate_channel(channel);
  if (!report.ok) {
    std::string msg = "config: invalid channel:";
    for (const auto& v : report.violations) msg += " [" + v + "]";
    throw std::invalid_argument(msg);
  }
  if ((scheme == Scheme::root || scheme == Scheme::timeshare_binary) && channel.p != 2) {
    throw std::invalid_argument("config: scheme '" + to_string(scheme) + "' requires p = 2");
  }
  if (static_cast<int>(rates.R.size()) != channel.d) {
    throw std::invalid_argument("config: need one rate per sender");
  }
  for (double r : rates.R) {
    if (!(r > 0.0)) throw std::invalid_argument("config: rates must be strictly positive");
  }
  if (blocklengths.empty()) throw std::invalid_argument("config: need at least one blocklength");
  for (std::int64_t n : blocklengths) {
    if (n <= 0 || n % channel.d != 0) {
      throw std::invalid_argument("config: every blocklength must be a positive multiple of d");
    }
  }
  if (trials < 0) throw std::invalid_argument("config: trials must be >= 0");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  if (!trace_path.empty() && workers != 1) {
    throw std::invalid_argument("config: trace dumps require workers = 1");
  }
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig config;
  config.scheme = scheme_from_string(j.at("scheme").get<std::string>());
  config.channel = channel_from_json(j);  // reads d, p, epsilon | matrix
  config.rates.R = j.at("rates").get<std::vector<double>>();
  config.blocklengths = j.at("blocklengths").get<std::vector<std::int64_t>>();
  config.trials = j.at("trials").get<std::int64_t>();
  config.master_seed = j.value("seed", std::uint64_t{0});
  config.output_path = j.value("out", std::string{});
  config.trace_path = j.value("trace", std::string{});
  config.workers = j.value("workers", 1);
  config.skip_permutation = j.value("skip_permutation", false);
  config.exhaustive = j.value("exhaustive", false);
  config.validate();
  return config;
}

TrialOutcome run_trial(const ExperimentConfig& config, std::int64_t n, std::int64_t trial_index) {
  return run_trial_verbose(config, n, trial_index, nullptr);
}

TrialOutcome run_trial_verbose(const ExperimentConfig& config, std::int64_t n,
                               std::int64_t trial_index, nlohmann::json* trace) {
  config.validate();
  const TrialContext ctx = make_context(config, n);
  if (config.exhaustive && trial_index >= ctx.exhaustive_total) {
    throw std::invalid_argument("run_trial: trial index beyond the exhaustive message space");
  }
  return run_trial_in_context(config, ctx, trial_index, trace);
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  SweepResult result;
  std::ofstream trace_stream;
  if (!config.trace_path.empty()) {
    trace_stream.open(config.trace_path);
    if (!trace_stream) {
      throw std::runtime_error("run_sweep: cannot open trace path " + config.trace_path);
    }
  }

  for (std::int64_t n : config.blocklengths) {
    const auto t0 = std::chrono::steady_clock::now();
    const TrialContext ctx = make_context(config, n);
    std::int64_t total = config.trials;
    if (config.exhaustive) {
      if (ctx.exhaustive_total > kExhaustiveCap) {
        throw std::invalid_argument("run_sweep: exhaustive message space too large");
      }
      total = ctx.exhaustive_total;
    }

    const int d = config.channel.d;
    std::int64_t errors = 0;
    std::vector<std::int64_t> sender_errors(static_cast<std::size_t>(d), 0);
    if (total > 0 && config.workers > 1) {
      // Each worker owns a strided slice and integer partial sums; integer
      // addition commutes, so totals are identical for any worker count.
      const int workers = static_cast<int>(std::min<std::int64_t>(config.workers, total));
      std::vector<std::int64_t> worker_errors(static_cast<std::size_t>(workers), 0);
      std::vector<std::vector<std::int64_t>> worker_sender_errors(
          static_cast<std::size_t>(workers), std::vector<std::int64_t>(static_cast<std::size_t>(d), 0));
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(workers));
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::int64_t t = w; t < total; t += workers) {
            const TrialOutcome outcome = run_trial_in_context(config, ctx, t, nullptr);
            if (!outcome.correct) ++worker_errors[static_cast<std::size_t>(w)];
            for (int i = 0; i < d; ++i) {
              if (!outcome.sender_correct[static_cast<std::size_t>(i)]) {
                ++worker_sender_errors[static_cast<std::size_t>(w)][static_cast<std::size_t>(i)];
              }
            }
          }
        });
      }
      for (auto& th : pool) th.join();
      for (int w = 0; w < workers; ++w) {
        errors += worker_errors[static_cast<std::size_t>(w)];
        for (int i = 0; i < d; ++i) {
          sender_errors[static_cast<std::size_t>(i)] +=
              worker_sender_errors[static_cast<std::size_t>(w)][static_cast<std::size_t>(i)];
        }
      }
    } else {
      for (std::int64_t t = 0; t < total; ++t) {
        nlohmann::json trace;
        const bool want_trace = trace_stream.is_open();
        const TrialOutcome outcome =
            run_trial_in_context(config, ctx, t, want_trace ? &trace : nullptr);
        if (want_trace) trace_stream << trace.dump() << '\n';
        if (!outcome.correct) ++errors;
        for (int i = 0; i < d; ++i) {
          if (!outcome.sender_correct[static_cast<std::size_t>(i)]) {
            ++sender_errors[static_cast<std::size_t>(i)];
          }
        }
      }
    }

    SweepRow row;
    row.n = n;
    row.trials = total;
    row.errors = errors;
    row.error_rate = total > 0 ? static_cast<double>(errors) / static_cast<double>(total) : 0.0;
    wilson_interval(errors, total, &row.wilson_lo, &row.wilson_hi);
    row.sender_errors = sender_errors;
    row.envelope = analytic_error_envelope(config.channel, n);
    if (config.scheme == Scheme::root) {
      for (int size : ctx.slot_sizes) {
        row.effective_rates.push_back(std::log(static_cast<double>(size)) /
                                      std::log(static_cast<double>(n)));
      }
    } else {
      row.effective_rates = ctx.layout.effective_rates;
    }
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.rows.push_back(std::move(row));
  }

  result.error_rate_strictly_decreasing = result.rows.size() > 1;
  for (std::size_t i = 0; i + 1 < result.rows.size(); ++i) {
    if (!(result.rows[i + 1].error_rate < result.rows[i].error_rate)) {
      result.error_rate_strictly_decreasing = false;
    }
  }

  if (!config.output_path.empty()) {
    std::ofstream out(config.output_path);
    if (!out) throw std::runtime_error("run_sweep: cannot open output path " + config.output_path);
    out << sweep_csv(config, result);
  }
  return result;
}

double hoeffding_bound(std::int64_t n, double tau) {
  if (n < 1 || !(tau > 0.0)) {
    throw std::invalid_argument("hoeffding_bound: need n >= 1 and tau > 0");
  }
  return 2.0 * std::exp(-2.0 * static_cast<double>(n) * tau * tau);
}

double analytic_error_envelope(const ChannelSpec& spec, std::int64_t n) {
  const double nn = static_cast<double>(n);
  return 2.0 * static_cast<double>(spec.q) / (nn * nn);
}

void wilson_interval(std::int64_t errors, std::int64_t trials, double* lo, double* hi) {
  if (trials <= 0) {
    *lo = 0.0;
    *hi = 1.0;
    return;
  }
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(errors) / n;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      kWilsonZ * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  *lo = errors == 0 ? 0.0 : std::max(0.0, center - half);
  *hi = errors == trials ? 1.0 : std::min(1.0, center + half);
}

std::string sweep_csv(const ExperimentConfig& config, const SweepResult& result) {
  std::string out =
      "scheme,d,p,n,rates,effective_rates,epsilon,trials,errors,error_rate,wilson_lo,wilson_hi,"
      "seed,envelope\n";
  for (const SweepRow& row : result.rows) {
    out += to_string(config.scheme);
    out += ',' + std::to_string(config.channel.d);
    out += ',' + std::to_string(config.channel.p);
    out += ',' + std::to_string(row.n);
    out += ',' + join_rates(config.rates.R);
    out += ',' + join_rates(row.effective_rates);
    out += ',' + format_double(config.channel.epsilon);
    out += ',' + std::to_string(row.trials);
    out += ',' + std::to_string(row.errors);
    out += ',' + format_double(row.error_rate);
    out += ',' + format_double(row.wilson_lo);
    out += ',' + format_double(row.wilson_hi);
    out += ',' + std::to_string(config.master_seed);
    out += ',' + format_double(row.envelope);
    out += '\n';
  }
  return out;
}

}  // namespace pamac
