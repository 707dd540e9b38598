#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"

#include "pamac/channel.hpp"
#include "pamac/codec_timeshare.hpp"
#include "pamac/linalg.hpp"
#include "pamac/model.hpp"
#include "pamac/rational.hpp"
#include "pamac/rng.hpp"

using namespace pamac;

namespace {

/// Rates that make build_layout pick exactly the requested granularities:
/// m_i = round(n^{R_i/(d(p−1))}) is exact when R_i = d(p−1)·log m_i / log n.
RateTuple rates_for_m(std::int64_t n, int d, int p, const std::vector<int>& m) {
  RateTuple rates;
  for (int mi : m) {
    rates.R.push_back(static_cast<double>(d) * (p - 1) * std::log(static_cast<double>(mi)) /
                      std::log(static_cast<double>(n)));
  }
  return rates;
}

}  // namespace

TEST_CASE("simplex lattices enumerate in ascending lexicographic digit order") {
  const SimplexLattice regular = build_lattice(2, 4, false);
  CHECK(regular.denominator == 3);
  REQUIRE(regular.size() == 4);
  CHECK(regular.digits[0] == std::vector<int>{0, 3});
  CHECK(regular.digits[1] == std::vector<int>{1, 2});
  CHECK(regular.digits[2] == std::vector<int>{2, 1});
  CHECK(regular.digits[3] == std::vector<int>{3, 0});

  const SimplexLattice last = build_lattice(2, 4, true);
  CHECK(last.denominator == 4);
  REQUIRE(last.size() == 3);  // digits capped at m−1, so (0,4) and (4,0) are excluded
  CHECK(last.digits[0] == std::vector<int>{1, 3});
  CHECK(last.digits[1] == std::vector<int>{2, 2});
  CHECK(last.digits[2] == std::vector<int>{3, 1});

  CHECK_THROWS(build_lattice(1, 4, false));
  CHECK_THROWS(build_lattice(2, 1, false));
}

TEST_CASE("lattice rank inverts the enumeration and rejects off-lattice tuples") {
  for (int p : {2, 3, 4}) {
    for (int m : {2, 3, 5}) {
      for (bool is_last : {false, true}) {
        const SimplexLattice lat = build_lattice(p, m, is_last);
        for (int r = 0; r < lat.size(); ++r) {
          CHECK(lat.rank(lat.digits[static_cast<std::size_t>(r)]) == r);
          const std::vector<Rational> pt = lat.point(r);
          Rational sum(0);
          for (std::size_t k = 0; k < pt.size(); ++k) {
            CHECK(pt[k] == Rational(lat.digits[static_cast<std::size_t>(r)][k], lat.denominator));
            sum += pt[k];
          }
          CHECK(sum == Rational(1));
        }
      }
    }
  }
  const SimplexLattice lat = build_lattice(2, 4, false);
  CHECK(lat.rank({0, 0}) == -1);        // wrong sum
  CHECK(lat.rank({4, -1}) == -1);       // out-of-range digits
  CHECK(lat.rank({0, 1, 2}) == -1);     // wrong arity
}

TEST_CASE("closed-form lattice sizes match enumeration") {
  CHECK(lattice_size(2, 4, false) == 4);
  CHECK(lattice_size(2, 4, true) == 3);
  CHECK(lattice_size(3, 3, false) == 6);    // multichoose(3,2)
  CHECK(lattice_size(3, 3, true) == 7);     // multichoose(4,2) − 3
  CHECK(lattice_size(4, 2, false) == 4);
  for (int p : {2, 3, 4, 5}) {
    for (int m : {2, 3, 4, 7}) {
      for (bool is_last : {false, true}) {
        CHECK(lattice_size(p, m, is_last) == build_lattice(p, m, is_last).size());
      }
    }
  }
}

TEST_CASE("largest-remainder apportionment is exact and breaks ties low") {
  CHECK(apportion_largest_remainder(10, {1, 1, 1, 1}) ==
        std::vector<std::int64_t>{3, 3, 2, 2});
  CHECK(apportion_largest_remainder(7, {1, 1, 1}) == std::vector<std::int64_t>{3, 2, 2});
  CHECK(apportion_largest_remainder(500, {12, 4}) == std::vector<std::int64_t>{375, 125});
  CHECK(apportion_largest_remainder(0, {3, 5}) == std::vector<std::int64_t>{0, 0});

  // Σ sizes == total for arbitrary weights.
  Rng rng(301);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 1 + static_cast<int>(rng.uniform_below(6));
    std::vector<std::int64_t> weights(static_cast<std::size_t>(k));
    for (auto& w : weights) w = 1 + static_cast<std::int64_t>(rng.uniform_below(40));
    const std::int64_t total = static_cast<std::int64_t>(rng.uniform_below(1000));
    const auto sizes = apportion_largest_remainder(total, weights);
    std::int64_t sum = 0;
    for (std::int64_t s : sizes) sum += s;
    CHECK(sum == total);
  }
}

TEST_CASE("layout for n=1000, equal rates 0.4 lands on granularity 4") {
  const TimeShareLayout layout = build_layout(1000, 2, 2, RateTuple{{0.4, 0.4}});
  CHECK(layout.m == std::vector<int>{4, 4});
  CHECK(layout.m_total == 16);
  CHECK(layout.segment_len == 500);
  REQUIRE(layout.rho.size() == 2);
  CHECK(layout.rho[0] == Rational(3, 4));
  CHECK(layout.rho[1] == Rational(1, 4));
  CHECK(layout.sub_sizes == std::vector<std::int64_t>{375, 125});
  REQUIRE(layout.lattices.size() == 2);
  CHECK(layout.lattices[0].size() == 4);
  CHECK(layout.lattices[1].size() == 3);
  const double expected_rate = 2.0 * std::log(4.0) / std::log(1000.0);
  CHECK(layout.effective_rates[0] == doctest::Approx(expected_rate).epsilon(1e-15));
  CHECK(layout.effective_rates[1] == doctest::Approx(expected_rate).epsilon(1e-15));
}

TEST_CASE("subsegment proportions telescope for hand-checked granularities") {
  // m = (3,4): ρ = ((3−1)/3, 4/12) = (2/3, 1/3)
  const TimeShareLayout ab = build_layout(2400, 2, 2, rates_for_m(2400, 2, 2, {3, 4}));
  REQUIRE(ab.m == std::vector<int>{3, 4});
  CHECK(ab.m_total == 12);
  CHECK(ab.rho[0] == Rational(2, 3));
  CHECK(ab.rho[1] == Rational(1, 3));
  CHECK(ab.sub_sizes == std::vector<std::int64_t>{800, 400});

  // m = (10,10,10): ρ = (9/10, 9/100, 1/100); sizes split 1000 exactly
  const TimeShareLayout c = build_layout(3000, 3, 2, rates_for_m(3000, 3, 2, {10, 10, 10}));
  REQUIRE(c.m == std::vector<int>{10, 10, 10});
  CHECK(c.rho == std::vector<Rational>{Rational(9, 10), Rational(9, 100), Rational(1, 100)});
  CHECK(c.sub_sizes == std::vector<std::int64_t>{900, 90, 10});

  Rational rho_sum(0);
  for (const Rational& r : c.rho) rho_sum += r;
  CHECK(rho_sum == Rational(1));
}

TEST_CASE("layout construction validates its arguments") {
  CHECK_THROWS(build_layout(999, 2, 2, RateTuple{{0.4, 0.4}}));   // not a multiple of d
  CHECK_THROWS(build_layout(0, 2, 2, RateTuple{{0.4, 0.4}}));
  CHECK_THROWS(build_layout(1000, 2, 2, RateTuple{{0.4}}));       // one rate per sender
  CHECK_THROWS(build_layout(1000, 2, 2, RateTuple{{0.4, 0.0}}));  // rates must be positive
  CHECK_THROWS(build_layout(1000, 1, 2, RateTuple{{0.4}}));
}

TEST_CASE("mixed-radix packing is the inverse of unpacking") {
  const std::vector<int> m = {3, 4};
  CHECK(mixed_radix_pack({1, 3}, m) == 7);
  CHECK(mixed_radix_unpack(7, m) == std::vector<std::int64_t>{1, 3});
  for (std::int64_t v = 0; v < 12; ++v) {
    CHECK(mixed_radix_pack(mixed_radix_unpack(v, m), m) == v);
  }
  CHECK_THROWS(mixed_radix_pack({3, 0}, m));   // digit ≥ base
  CHECK_THROWS(mixed_radix_pack({-1, 0}, m));
  CHECK_THROWS(mixed_radix_unpack(12, m));     // value ≥ ∏ m
  CHECK_THROWS(mixed_radix_unpack(-1, m));
}

TEST_CASE("scalar packing h matches the hand-filled table for m=(3,4)") {
  const std::vector<int> m = {3, 4};
  // Sender 1 grid {0, 1/2, 1}; sender 2 grid {0, 1/4, 2/4, 3/4}; ρ = (2/3, 1/3).
  CHECK(h_forward({Rational(1, 2), Rational(2, 4)}, m) == Rational(6, 12));
  CHECK(h_forward({Rational(1), Rational(3, 4)}, m) == Rational(11, 12));
  CHECK(h_forward({Rational(0), Rational(0)}, m) == Rational(0));
  CHECK(h_forward({Rational(0), Rational(1, 4)}, m) == Rational(1, 12));
  CHECK_THROWS(h_forward({Rational(1, 3), Rational(0)}, m));  // off the sender-1 grid
  CHECK_THROWS(h_forward({Rational(0)}, m));                  // arity mismatch

  // Round trip through every grid combination; φ values are all distinct.
  std::vector<Rational> seen;
  for (int l0 = 0; l0 < 3; ++l0) {
    for (int l1 = 0; l1 < 4; ++l1) {
      const std::vector<Rational> theta = {Rational(l0, 2), Rational(l1, 4)};
      const Rational phi = h_forward(theta, m);
      CHECK(h_inverse(phi, m) == theta);
      CHECK(phi == Rational(mixed_radix_pack({l0, l1}, m), 12));
      seen.push_back(phi);
    }
  }
  std::sort(seen.begin(), seen.end());
  CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
  CHECK_THROWS(h_inverse(Rational(1, 24), m));  // not on the Φ grid
}

TEST_CASE("phi digits round half-ties toward the smaller value and clamp") {
  CHECK(round_to_phi_digit(0.125, 4) == 0);   // 0.5 rounds down
  CHECK(round_to_phi_digit(0.375, 4) == 1);   // 1.5 rounds down
  CHECK(round_to_phi_digit(0.3, 4) == 1);
  CHECK(round_to_phi_digit(0.13, 4) == 1);
  CHECK(round_to_phi_digit(-2.0, 4) == 0);
  CHECK(round_to_phi_digit(5.0, 4) == 3);
}

TEST_CASE("encoded codewords have the documented segment structure") {
  // n=8, d=2, p=2, m=(2,2): segments of 4, subsegments of 2.  Sender 0's
  // lattice points are the two degenerate PMFs, so its codeword is fully
  // deterministic; sender 1's single lattice point is Bernoulli(1/2), so only
  // its passive letters are pinned.
  const TimeShareLayout layout = build_layout(8, 2, 2, rates_for_m(8, 2, 2, {2, 2}));
  REQUIRE(layout.m == std::vector<int>{2, 2});
  REQUIRE(layout.sub_sizes == std::vector<std::int64_t>{2, 2});

  Rng rng(302);
  // Rank 1 = digits (1,0) = always symbol 0; rank 0 = (0,1) = always symbol 1.
  CHECK(encode_timeshare({1, 1}, 0, layout, rng) == Codeword{0, 0, 0, 0, 0, 0, 1, 1});
  CHECK(encode_timeshare({1, 0}, 0, layout, rng) == Codeword{0, 0, 0, 0, 1, 1, 1, 1});
  CHECK(encode_timeshare({0, 0}, 0, layout, rng) == Codeword{1, 1, 0, 0, 1, 1, 1, 1});

  const Codeword second = encode_timeshare({0, 0}, 1, layout, rng);
  REQUIRE(second.size() == 8);
  CHECK(second[0] == 0);  // passive in segment 0: contributes 0
  CHECK(second[1] == 0);
  CHECK(second[4] == 1);  // passive in segment 1: contributes p−1
  CHECK(second[5] == 1);
  for (int j : {2, 3, 6, 7}) {  // active letters are random but in-alphabet
    CHECK((second[static_cast<std::size_t>(j)] == 0 || second[static_cast<std::size_t>(j)] == 1));
  }

  CHECK_THROWS(encode_timeshare({0}, 0, layout, rng));      // one rank per segment
  CHECK_THROWS(encode_timeshare({4, 0}, 0, layout, rng));   // rank out of range
  CHECK_THROWS(encode_timeshare({0, 0}, 2, layout, rng));   // sender out of range
}

TEST_CASE("passive letters in any segment sum to the segment shift") {
  const TimeShareLayout layout = build_layout(120, 3, 3, rates_for_m(120, 3, 3, {2, 2, 2}));
  Rng rng(303);
  std::vector<Codeword> words;
  for (int i = 0; i < 3; ++i) {
    const TimeShareMessage msg = {0, 0, 0};
    words.push_back(encode_timeshare(msg, i, layout, rng));
  }
  // Position j belongs to segment c and subsegment b; the two passive senders
  // there must contribute exactly c·(p−1) between them.
  std::int64_t pos = 0;
  for (int c = 0; c < 3; ++c) {
    for (int b = 0; b < 3; ++b) {
      for (std::int64_t j = 0; j < layout.sub_sizes[static_cast<std::size_t>(b)]; ++j, ++pos) {
        int passive_sum = 0;
        for (int i = 0; i < 3; ++i) {
          if (i != b) passive_sum += words[static_cast<std::size_t>(i)][static_cast<std::size_t>(pos)];
        }
        CHECK(passive_sum == c * 2);
      }
    }
  }
  CHECK(pos == 120);
}

TEST_CASE("decoder matrices for d=2, p=3 match the hand-written pattern") {
  const ChannelSpec spec = default_channel(2, 3, 0.2);
  const TimeShareLayout layout = build_layout(400, 2, 3, rates_for_m(400, 2, 3, {2, 2}));
  const DecoderMatrices mats = build_decoder_matrices(spec, layout);

  REQUIRE(mats.C1.rows == 5);
  REQUIRE(mats.C1.cols == 6);
  const int expected_c1[5][6] = {
      {1, 0, 0, 0, 0, 0},
      {0, 1, 0, 0, 0, 0},
      {0, 0, 1, 1, 0, 0},  // middle adder level is reachable from both segments
      {0, 0, 0, 0, 1, 0},
      {0, 0, 0, 0, 0, 1},
  };
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 6; ++c) {
      CHECK(mats.C1.at(r, c) == expected_c1[r][c]);
    }
  }

  REQUIRE(mats.C2.rows == 2);
  REQUIRE(mats.C2.cols == 6);
  for (int c = 0; c < 6; ++c) {
    CHECK(mats.C2.at(0, c) == (c < 3 ? 1 : 0));
    CHECK(mats.C2.at(1, c) == (c < 3 ? 0 : 1));
  }

  // C stacks C1 over C2 and has exactly 2dp ones.
  REQUIRE(mats.C.rows == 7);
  CHECK(frobenius_norm(mats.C) == doctest::Approx(std::sqrt(12.0)).epsilon(1e-15));
  for (int r = 0; r < 7; ++r) {
    for (int c = 0; c < 6; ++c) {
      const double expected = r < 5 ? mats.C1.at(r, c) : mats.C2.at(r - 5, c);
      CHECK(mats.C.at(r, c) == expected);
    }
  }

  // B is block-diagonal [Pᵀ, 0; 0, I_d] and A = B·C has full column rank.
  REQUIRE(mats.B.rows == 7);
  for (int r = 0; r < 7; ++r) {
    for (int c = 0; c < 7; ++c) {
      const double expected = (r < 5 && c < 5) ? spec.P.at(c, r) : (r == c ? 1.0 : 0.0);
      CHECK(mats.B.at(r, c) == doctest::Approx(expected).epsilon(1e-15));
    }
  }
  const DenseMatrix product = multiply(mats.B, mats.C);
  for (int r = 0; r < 7; ++r) {
    for (int c = 0; c < 6; ++c) {
      CHECK(mats.A.at(r, c) == doctest::Approx(product.at(r, c)).epsilon(1e-15));
    }
  }
  CHECK(min_singular_value(mats.A) > 0.05);
}

TEST_CASE("exact output statistics decode to the transmitted messages") {
  SUBCASE("general decoder, p=3") {
    const ChannelSpec spec = default_channel(2, 3, 0.25);
    const TimeShareLayout layout = build_layout(400, 2, 3, rates_for_m(400, 2, 3, {2, 2}));
    const DecoderMatrices mats = build_decoder_matrices(spec, layout);
    const std::int64_t s0 = layout.lattices[0].size();  // 3 points per segment
    const std::int64_t s1 = layout.lattices[1].size();
    for (int a0 = 0; a0 < s0; ++a0) {
      for (int a1 = 0; a1 < s0; ++a1) {
        for (int b0 = 0; b0 < s1; ++b0) {
          for (int b1 = 0; b1 < s1; ++b1) {
            const std::vector<TimeShareMessage> msgs = {{a0, a1}, {b0, b1}};
            const Distribution p_y = timeshare_output_marginal(msgs, spec, layout);
            const TimeShareDecodeResult out =
                decode_timeshare_from_empirical(p_y, spec, layout, mats);
            CHECK_FALSE(out.decode_failed);
            CHECK(out.message_ranks == msgs);
          }
        }
      }
    }
  }
  SUBCASE("general and binary decoders, p=2") {
    const ChannelSpec spec = default_channel(2, 2, 0.3);
    const TimeShareLayout layout = build_layout(600, 2, 2, rates_for_m(600, 2, 2, {3, 3}));
    const DecoderMatrices mats = build_decoder_matrices(spec, layout);
    for (int a0 = 0; a0 < 3; ++a0) {
      for (int a1 = 0; a1 < 3; ++a1) {
        for (int b0 = 0; b0 < 2; ++b0) {
          for (int b1 = 0; b1 < 2; ++b1) {
            const std::vector<TimeShareMessage> msgs = {{a0, a1}, {b0, b1}};
            const Distribution p_y = timeshare_output_marginal(msgs, spec, layout);
            const TimeShareDecodeResult general =
                decode_timeshare_from_empirical(p_y, spec, layout, mats);
            CHECK(general.message_ranks == msgs);
            const TimeShareDecodeResult binary =
                decode_timeshare_binary_from_empirical(p_y, spec, layout);
            CHECK(binary.message_ranks == msgs);
          }
        }
      }
    }
  }
}

TEST_CASE("output marginal for a hand-computed message pair") {
  const ChannelSpec spec = default_channel(2, 2, 0.3);
  const TimeShareLayout layout = build_layout(8, 2, 2, rates_for_m(8, 2, 2, {2, 2}));
  // Sender 0 sends rank 1 (parameter 0) in both segments; sender 1 has only
  // rank 0 (parameter 1/2).  Mixing the four subsegments with weight 1/4 each:
  // p_W = (0.375, 0.5, 0.125), then p_Z = 0.7·p_W + 0.1.
  const Distribution p_y =
      timeshare_output_marginal({{1, 1}, {0, 0}}, spec, layout);
  REQUIRE(p_y.w.size() == 3);
  CHECK(p_y.w[0] == doctest::Approx(0.7 * 0.375 + 0.1).epsilon(1e-15));
  CHECK(p_y.w[1] == doctest::Approx(0.7 * 0.5 + 0.1).epsilon(1e-15));
  CHECK(p_y.w[2] == doctest::Approx(0.7 * 0.125 + 0.1).epsilon(1e-15));
}

TEST_CASE("inconsistent statistics set the failure flag without throwing") {
  // Craft a genuine distribution whose least-squares solution rounds to
  // digits that are not lattice points: per-segment scalars must sum to 1,
  // but the per-sender digit slices may still leave their simplexes.
  const ChannelSpec spec = default_channel(2, 3, 0.2);
  const TimeShareLayout layout = build_layout(400, 2, 3, rates_for_m(400, 2, 3, {2, 2}));
  const DecoderMatrices mats = build_decoder_matrices(spec, layout);

  // φ digits per (segment, symbol): segment 0 = (2,2,0) — sender slices
  // (1,1,0) and (0,0,0) are both off-lattice; segment 1 = (0,1,3) — the valid
  // message pair (rank 0, rank 0).
  const std::vector<double> phi = {0.5, 0.5, 0.0, 0.0, 0.25, 0.75};
  std::vector<double> pw(5, 0.0);
  for (int c = 0; c < 2; ++c) {
    for (int k = 0; k < 3; ++k) {
      pw[static_cast<std::size_t>(c * 2 + k)] += phi[static_cast<std::size_t>(c * 3 + k)];
    }
  }
  Distribution p_hat{std::vector<double>(5, 0.0), DistributionKind::empirical};
  for (int s = 0; s < 5; ++s) {
    for (int w = 0; w < 5; ++w) {
      p_hat.w[static_cast<std::size_t>(s)] += pw[static_cast<std::size_t>(w)] * spec.P.at(w, s) / 2.0;
    }
  }
  CHECK(p_hat.valid());

  const TimeShareDecodeResult out = decode_timeshare_from_empirical(p_hat, spec, layout, mats);
  CHECK(out.decode_failed);
  CHECK(out.phi_digits == std::vector<std::int64_t>{2, 2, 0, 0, 1, 3});
  CHECK(out.message_ranks[0] == TimeShareMessage{-1, 0});
  CHECK(out.message_ranks[1] == TimeShareMessage{-1, 0});
}

TEST_CASE("binary decoder maps the last sender's empty cell to a miss") {
  // All-zero parameters have no lattice point for the last sender (its
  // parameters live on {1/m, …, (m−1)/m}).  The decoder still produces a
  // guess: rank −1, which can never match, and no failure flag is raised.
  const ChannelSpec spec = default_channel(2, 2, 0.3);
  const TimeShareLayout layout = build_layout(8, 2, 2, rates_for_m(8, 2, 2, {2, 2}));
  // Both senders at parameter 0 in both segments: W is the passive shift c.
  Distribution p_hat{std::vector<double>(3, 0.0), DistributionKind::empirical};
  for (int c = 0; c < 2; ++c) {
    for (int s = 0; s < 3; ++s) {
      p_hat.w[static_cast<std::size_t>(s)] += spec.P.at(c, s) / 2.0;
    }
  }
  const TimeShareDecodeResult out = decode_timeshare_binary_from_empirical(p_hat, spec, layout);
  CHECK_FALSE(out.decode_failed);
  CHECK(out.message_ranks[0] == TimeShareMessage{1, 1});   // parameter 0 = rank 1
  CHECK(out.message_ranks[1] == TimeShareMessage{-1, -1});
}

TEST_CASE("simulated transmissions decode correctly at moderate blocklength") {
  const ChannelSpec spec = default_channel(2, 2, 0.05);
  const TimeShareLayout layout = build_layout(10000, 2, 2, RateTuple{{0.4, 0.4}});
  const std::vector<TimeShareMessage> msgs = {{2, 0}, {1, 2}};
  Rng enc0(304), enc1(305), dmc(306), perm(307);
  const std::vector<Codeword> x = {
      encode_timeshare(msgs[0], 0, layout, enc0),
      encode_timeshare(msgs[1], 1, layout, enc1),
  };
  const Codeword y = transmit(x, spec, dmc, perm);
  CHECK(decode_timeshare(y, spec, layout).message_ranks == msgs);
  CHECK(decode_timeshare_binary(y, spec, layout).message_ranks == msgs);
}
