// Microbenchmarks for the hot paths of a sweep: transmission, empirical
// estimation, both decoders, and the generating-function root finder.

#include <benchmark/benchmark.h>

#include "pamac/channel.hpp"
#include "pamac/codec_root.hpp"
#include "pamac/codec_timeshare.hpp"
#include "pamac/experiment.hpp"
#include "pamac/model.hpp"
#include "pamac/rng.hpp"

namespace {

using namespace pamac;

ExperimentConfig base_config(Scheme scheme, double rate) {
  ExperimentConfig config;
  config.scheme = scheme;
  config.channel = default_channel(2, 2, 0.05);
  config.rates.R = {rate, rate};
  config.blocklengths = {10000};
  config.trials = 1;
  config.master_seed = 7;
  return config;
}

void bench_transmit(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const ChannelSpec spec = default_channel(2, 2, 0.05);
  Rng enc0(1), enc1(2);
  std::vector<Codeword> x = {encode_root(0.3, n, enc0), encode_root(0.7, n, enc1)};
  std::uint64_t counter = 0;
  for (auto _ : state) {
    Rng dmc(derive_seed(11, ++counter));
    Rng perm(derive_seed(12, counter));
    benchmark::DoNotOptimize(transmit(x, spec, dmc, perm));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bench_transmit)->Arg(1000)->Arg(10000)->Arg(100000);

void bench_trial(benchmark::State& state, Scheme scheme, double rate) {
  const ExperimentConfig config = base_config(scheme, rate);
  const auto n = static_cast<std::int64_t>(state.range(0));
  std::int64_t trial = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_trial(config, n, trial++));
  }
}
BENCHMARK_CAPTURE(bench_trial, timeshare, Scheme::timeshare, 0.4)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(bench_trial, timeshare_binary, Scheme::timeshare_binary, 0.4)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(bench_trial, root, Scheme::root, 0.45)->Arg(1000)->Arg(10000);

void bench_poly_roots(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  std::vector<double> thetas(d);
  for (std::size_t i = 0; i < d; ++i) thetas[i] = 0.1 + 0.8 * static_cast<double>(i) / d;
  const Distribution pmf = bernoulli_sum_pmf(thetas);
  for (auto _ : state) {
    benchmark::DoNotOptimize(poly_roots(pmf.w));
  }
}
BENCHMARK(bench_poly_roots)->Arg(2)->Arg(4)->Arg(6);

void bench_scalar_packing(benchmark::State& state) {
  const std::vector<int> m = {7, 7, 7};
  std::int64_t v = 0;
  for (auto _ : state) {
    const auto digits = mixed_radix_unpack(v % 343, m);
    benchmark::DoNotOptimize(mixed_radix_pack(digits, m));
    ++v;
  }
}
BENCHMARK(bench_scalar_packing);

}  // namespace

BENCHMARK_MAIN();
