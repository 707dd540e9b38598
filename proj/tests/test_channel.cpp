#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "doctest.h"

#include "pamac/channel.hpp"
#include "pamac/model.hpp"
#include "pamac/rng.hpp"

using namespace pamac;

TEST_CASE("adder sums columns and checks its input") {
  const std::vector<Codeword> x = {{0, 1, 1}, {1, 1, 0}};
  CHECK(adder(x, 2) == Codeword{1, 2, 1});

  const std::vector<Codeword> ternary = {{0, 2, 1}, {2, 2, 0}, {1, 0, 2}};
  CHECK(adder(ternary, 3) == Codeword{3, 4, 3});

  CHECK_THROWS(adder({{0, 1}, {0}}, 2));        // ragged
  CHECK_THROWS(adder({{0, 2}, {0, 0}}, 2));     // symbol out of range for p=2
  CHECK_THROWS(adder({{0, -1}, {0, 0}}, 2));    // negative symbol
  CHECK_THROWS(adder({}, 2));                   // no senders
}

TEST_CASE("memoryless channel rows reproduce their distribution empirically") {
  const ChannelSpec spec = default_channel(2, 2, 0.3);
  const int n = 100000;
  Rng rng(101);
  const Codeword w(static_cast<std::size_t>(n), 1);  // every letter uses row 1
  const Codeword z = apply_dmc(w, spec, rng);
  const Distribution freq = empirical_distribution(z, spec.q);
  for (int t = 0; t < spec.q; ++t) {
    CHECK(freq.w[static_cast<std::size_t>(t)] ==
          doctest::Approx(spec.P.at(1, t)).epsilon(0.05));
  }
}

TEST_CASE("random permutations are uniform over S_3") {
  Rng rng(102);
  std::map<std::vector<int>, int> counts;
  const int trials = 60000;
  for (int t = 0; t < trials; ++t) ++counts[random_permutation(3, rng)];
  CHECK(counts.size() == 6);
  for (const auto& [perm, count] : counts) {
    CHECK(static_cast<double>(count) / trials == doctest::Approx(1.0 / 6).epsilon(0.06));
  }
}

TEST_CASE("random permutations are genuine bijections") {
  Rng rng(103);
  for (int n : {1, 2, 5, 17}) {
    std::vector<int> sigma = random_permutation(n, rng);
    std::sort(sigma.begin(), sigma.end());
    std::vector<int> expected(static_cast<std::size_t>(n));
    std::iota(expected.begin(), expected.end(), 0);
    CHECK(sigma == expected);
  }
}

TEST_CASE("permute preserves the multiset and reports its permutation") {
  Rng rng(104);
  const Codeword z = {0, 1, 2, 2, 1, 0, 2};
  std::vector<int> sigma;
  const Codeword y = permute(z, rng, &sigma);
  REQUIRE(y.size() == z.size());
  REQUIRE(sigma.size() == z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    CHECK(y[j] == z[static_cast<std::size_t>(sigma[j])]);
  }
  Codeword sorted_y = y, sorted_z = z;
  std::sort(sorted_y.begin(), sorted_y.end());
  std::sort(sorted_z.begin(), sorted_z.end());
  CHECK(sorted_y == sorted_z);
}

TEST_CASE("transmit records every consistent pipeline stage") {
  const ChannelSpec spec = default_channel(2, 2, 0.1);
  Rng enc(105);
  std::vector<Codeword> x(2);
  for (auto& word : x) {
    word.resize(50);
    for (int& s : word) s = static_cast<int>(enc.uniform_below(2));
  }
  Rng dmc(106), perm(107);
  TransmissionRecord record;
  const Codeword y = transmit(x, spec, dmc, perm, false, &record);
  CHECK(record.x == x);
  CHECK(record.w == adder(x, spec.p));
  CHECK(record.y == y);
  CHECK(record.z.size() == y.size());
  for (std::size_t j = 0; j < y.size(); ++j) {
    CHECK(y[j] == record.z[static_cast<std::size_t>(record.sigma[j])]);
  }
}

TEST_CASE("skipping the permutation stage leaves the channel output in place") {
  const ChannelSpec spec = default_channel(2, 2, 0.1);
  std::vector<Codeword> x = {{0, 1, 0, 1, 1}, {1, 1, 0, 0, 1}};
  Rng dmc(108), perm(109);
  TransmissionRecord record;
  const Codeword y = transmit(x, spec, dmc, perm, true, &record);
  CHECK(y == record.z);
}

TEST_CASE("channel and permutation consume independent streams") {
  const ChannelSpec spec = default_channel(2, 2, 0.1);
  std::vector<Codeword> x = {{0, 1, 0, 1, 1, 0, 1, 0}, {1, 1, 0, 0, 1, 1, 0, 0}};
  TransmissionRecord with_perm, without_perm;
  {
    Rng dmc(110), perm(111);
    transmit(x, spec, dmc, perm, false, &with_perm);
  }
  {
    Rng dmc(110), perm(112);
    transmit(x, spec, dmc, perm, true, &without_perm);
  }
  // same dmc seed => same z, whatever the permutation stage did
  CHECK(with_perm.z == without_perm.z);
}

TEST_CASE("empirical distribution counts exactly") {
  const Distribution freq = empirical_distribution({0, 2, 2, 1, 2}, 4);
  CHECK(freq.w == std::vector<double>{0.2, 0.2, 0.6, 0.0});
  CHECK(freq.kind == DistributionKind::empirical);
  CHECK_THROWS(empirical_distribution({}, 3));
  CHECK_THROWS(empirical_distribution({0, 3}, 3));
  CHECK_THROWS(empirical_distribution({0, -1}, 3));
}

TEST_CASE("exact mixture marginal of hand-built components") {
  Distribution a{{1.0, 0.0, 0.0}, DistributionKind::exact};
  Distribution b{{0.0, 0.0, 1.0}, DistributionKind::exact};
  const Distribution mix = marginal_y_exact({a, b}, {0.25, 0.75});
  CHECK(mix.w[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(mix.w[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(mix.w[2] == doctest::Approx(0.75).epsilon(1e-15));

  CHECK_THROWS(marginal_y_exact({a, b}, {0.5, 0.4}));  // weights must sum to one
  Distribution wrong_alphabet{{0.5, 0.5}, DistributionKind::exact};
  CHECK_THROWS(marginal_y_exact({a, wrong_alphabet}, {0.5, 0.5}));
  CHECK_THROWS(marginal_y_exact({}, {}));
}

TEST_CASE("per-letter output marginal equals brute force over words and permutations") {
  // Three independent letters with different distributions, uniformly
  // permuted: every output position must see the average distribution.
  const int n = 3;
  const int alphabet = 2;
  const std::vector<std::vector<double>> letter_dist = {
      {0.9, 0.1}, {0.4, 0.6}, {0.25, 0.75}};

  std::vector<std::vector<double>> brute(static_cast<std::size_t>(n),
                                         std::vector<double>(alphabet, 0.0));
  std::vector<int> sigma = {0, 1, 2};
  std::vector<int> z(static_cast<std::size_t>(n));
  do {
    for (int code = 0; code < 8; ++code) {  // all words in {0,1}^3
      double prob = 1.0 / 6.0;              // uniform over the 6 permutations
      for (int j = 0; j < n; ++j) {
        z[static_cast<std::size_t>(j)] = (code >> j) & 1;
        prob *= letter_dist[static_cast<std::size_t>(j)]
                           [static_cast<std::size_t>(z[static_cast<std::size_t>(j)])];
      }
      for (int j = 0; j < n; ++j) {
        const int symbol = z[static_cast<std::size_t>(sigma[static_cast<std::size_t>(j)])];
        brute[static_cast<std::size_t>(j)][static_cast<std::size_t>(symbol)] += prob;
      }
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));

  std::vector<Distribution> components;
  for (const auto& dist : letter_dist) {
    components.push_back({dist, DistributionKind::exact});
  }
  const Distribution mix = marginal_y_exact(components, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  for (int j = 0; j < n; ++j) {
    for (int t = 0; t < alphabet; ++t) {
      CHECK(brute[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)] ==
            doctest::Approx(mix.w[static_cast<std::size_t>(t)]).epsilon(1e-14));
    }
  }
}
