#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"

#include "pamac/channel.hpp"
#include "pamac/codec_root.hpp"
#include "pamac/linalg.hpp"
#include "pamac/model.hpp"
#include "pamac/rational.hpp"
#include "pamac/rng.hpp"

using namespace pamac;

TEST_CASE("parameter grids for d=2, sizes (3,4) are the hand-derived rationals") {
  const RootCodebook book = build_root_codebook(2, {3, 4});
  REQUIRE(book.grids.size() == 2);
  REQUIRE(book.grids[0].size() == 3);
  REQUIRE(book.grids[1].size() == 4);

  CHECK(book.grids[0][0] == Rational(1, 5));
  CHECK(book.grids[0][1] == Rational(3, 10));
  CHECK(book.grids[0][2] == Rational(2, 5));

  CHECK(book.grids[1][0] == Rational(3, 5));
  CHECK(book.grids[1][1] == Rational(2, 3));
  CHECK(book.grids[1][2] == Rational(11, 15));
  CHECK(book.grids[1][3] == Rational(4, 5));

  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t l = 0; l < book.grids[i].size(); ++l) {
      CHECK(book.grid_values[i][l] == doctest::Approx(book.grids[i][l].to_double()).epsilon(1e-16));
    }
  }
}

TEST_CASE("grids of adjacent senders are separated by exactly 1/(2d+1)") {
  for (int d : {2, 3, 5}) {
    const RootCodebook book = build_root_codebook(d, std::vector<int>(static_cast<std::size_t>(d), 4));
    const Rational margin(1, 2 * d + 1);
    CHECK(book.grids[0][0] == margin);  // first grid starts one margin above 0
    for (int i = 0; i + 1 < d; ++i) {
      const Rational gap = book.grids[static_cast<std::size_t>(i + 1)].front() -
                           book.grids[static_cast<std::size_t>(i)].back();
      CHECK(gap == margin);
    }
    const Rational top = book.grids[static_cast<std::size_t>(d - 1)].back();
    CHECK(Rational(1) - top == margin);  // last grid ends one margin below 1
  }
}

TEST_CASE("codebook construction validates its arguments") {
  CHECK_THROWS(build_root_codebook(1, {2}));
  CHECK_THROWS(build_root_codebook(2, {2}));        // one size per sender
  CHECK_THROWS(build_root_codebook(2, {2, 1}));     // at least two points each
}

TEST_CASE("root encoder draws the requested Bernoulli rate") {
  Rng rng(201);
  const Codeword x = encode_root(0.3, 100000, rng);
  double ones = 0.0;
  for (int s : x) {
    CHECK((s == 0 || s == 1));
    ones += s;
  }
  CHECK(ones / static_cast<double>(x.size()) == doctest::Approx(0.3).epsilon(0.02));
  CHECK_THROWS(encode_root(0.0, 10, rng));
  CHECK_THROWS(encode_root(1.0, 10, rng));
}

TEST_CASE("Bernoulli-sum PMF matches the hand convolution") {
  const Distribution pmf = bernoulli_sum_pmf({1.0 / 3, 1.0 / 2});
  REQUIRE(pmf.w.size() == 3);
  CHECK(pmf.w[0] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(pmf.w[1] == doctest::Approx(1.0 / 2).epsilon(1e-15));
  CHECK(pmf.w[2] == doctest::Approx(1.0 / 6).epsilon(1e-15));
  CHECK_THROWS(bernoulli_sum_pmf({0.5, 1.5}));
}

TEST_CASE("Bernoulli-sum PMF matches brute-force enumeration over outcomes") {
  Rng rng(202);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(rng.uniform_below(5));
    std::vector<double> thetas(static_cast<std::size_t>(d));
    for (double& t : thetas) t = rng.uniform01();

    std::vector<double> brute(static_cast<std::size_t>(d + 1), 0.0);
    for (int mask = 0; mask < (1 << d); ++mask) {
      double prob = 1.0;
      int sum = 0;
      for (int i = 0; i < d; ++i) {
        const bool one = (mask >> i) & 1;
        prob *= one ? thetas[static_cast<std::size_t>(i)] : 1.0 - thetas[static_cast<std::size_t>(i)];
        sum += one;
      }
      brute[static_cast<std::size_t>(sum)] += prob;
    }

    const Distribution pmf = bernoulli_sum_pmf(thetas);
    REQUIRE(pmf.w.size() == brute.size());
    for (std::size_t t = 0; t < brute.size(); ++t) {
      CHECK(pmf.w[t] == doctest::Approx(brute[t]).epsilon(1e-13));
    }
  }
}

TEST_CASE("generating-function roots of a hand-factored quadratic") {
  // PMF (1/3, 1/2, 1/6) has G(x) = (1/6)(x+1)(x+2)
  const PgfEstimate pgf = poly_roots({1.0 / 3, 1.0 / 2, 1.0 / 6});
  REQUIRE(pgf.roots.size() == 2);
  CHECK_FALSE(pgf.degenerate);
  CHECK(pgf.converged);
  std::vector<double> roots = {pgf.roots[0].real(), pgf.roots[1].real()};
  std::sort(roots.begin(), roots.end());
  CHECK(roots[0] == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(roots[1] == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(pgf.max_residual < 1e-12);
}

TEST_CASE("negligible leading coefficients are trimmed and flagged") {
  const PgfEstimate pgf = poly_roots({0.5, 0.5, 1e-15});
  CHECK(pgf.degenerate);
  REQUIRE(pgf.roots.size() == 1);
  CHECK(pgf.roots[0].real() == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("root-to-parameter map handles regular, pole, and complex inputs") {
  CHECK(theta_from_root({-1.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(theta_from_root({-3.0, 0.0}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(theta_from_root({1.0 + 1e-15, 0.0}) == kRootSentinel);
  CHECK(theta_from_root({1.0, 1e-3}) == kRootSentinel);  // only the real part matters
  // complex pairs contribute their real part
  CHECK(theta_from_root({-1.0, 0.5}) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("nearest grid index rounds half-ties toward the smaller point") {
  const std::vector<double> grid = {0.2, 0.3, 0.4};
  CHECK(nearest_grid_index(grid, 0.24) == 0);
  CHECK(nearest_grid_index(grid, 0.26) == 1);
  CHECK(nearest_grid_index(grid, 0.25) == 0);    // exact tie
  CHECK(nearest_grid_index(grid, 0.35) == 1);    // exact tie
  CHECK(nearest_grid_index(grid, -5.0) == 0);
  CHECK(nearest_grid_index(grid, 10.0) == 2);    // sentinels land on the top point
  CHECK_THROWS(nearest_grid_index({}, 0.1));
}

TEST_CASE("decoding exact statistics recovers every message pair") {
  const ChannelSpec spec = default_channel(2, 2, 0.2);
  const RootCodebook book = build_root_codebook(2, {3, 4});
  const DenseMatrix kernel_inverse = invert(spec.P);
  for (int i0 = 0; i0 < 3; ++i0) {
    for (int i1 = 0; i1 < 4; ++i1) {
      const Distribution p_w =
          bernoulli_sum_pmf({book.grid_values[0][static_cast<std::size_t>(i0)],
                             book.grid_values[1][static_cast<std::size_t>(i1)]});
      Distribution p_z{std::vector<double>(static_cast<std::size_t>(spec.q), 0.0),
                       DistributionKind::exact};
      for (int s = 0; s < spec.q; ++s) {
        for (int w = 0; w < spec.q; ++w) {
          p_z.w[static_cast<std::size_t>(s)] += p_w.w[static_cast<std::size_t>(w)] * spec.P.at(w, s);
        }
      }
      const RootDecodeResult out = decode_root_from_empirical(p_z, kernel_inverse, book);
      CHECK(out.indices == std::vector<int>{i0, i1});
      CHECK(out.thetas[0] == doctest::Approx(book.grid_values[0][static_cast<std::size_t>(i0)])
                                 .epsilon(1e-12));
    }
  }
}

TEST_CASE("a degenerate estimate decodes to sentinels on the top grid points") {
  // If the estimated adder PMF is the point mass at 0, the generating
  // function is constant: no roots survive, every sender gets the sentinel,
  // and the sentinel rounds to each sender's largest grid point.
  const ChannelSpec spec = default_channel(2, 2, 0.2);
  const RootCodebook book = build_root_codebook(2, {3, 4});
  const DenseMatrix kernel_inverse = invert(spec.P);
  Distribution p_z{{spec.P.at(0, 0), spec.P.at(0, 1), spec.P.at(0, 2)},
                   DistributionKind::exact};  // exactly row 0 of the kernel
  const RootDecodeResult out = decode_root_from_empirical(p_z, kernel_inverse, book);
  CHECK(out.pgf.degenerate);
  CHECK(out.raw_thetas == std::vector<double>{kRootSentinel, kRootSentinel});
  CHECK(out.indices == std::vector<int>{2, 3});
}

TEST_CASE("full decoder runs the pipeline end to end at low noise") {
  const ChannelSpec spec = default_channel(2, 2, 0.01);
  const RootCodebook book = build_root_codebook(2, {3, 3});
  const int n = 20000;
  Rng enc0(203), enc1(204), dmc(205), perm(206);
  const std::vector<Codeword> x = {
      encode_root(book.grid_values[0][1], n, enc0),
      encode_root(book.grid_values[1][2], n, enc1),
  };
  const Codeword y = transmit(x, spec, dmc, perm);
  const RootDecodeResult out = decode_root(y, spec, book);
  CHECK(out.indices == std::vector<int>{1, 2});
}

TEST_CASE("root stability bound evaluates its closed form") {
  // monic (x+1)(x+2): coefficients (2, 3, 1); d=2, delta=1/2, error 1e-6:
  // (3 * 4 / 0.5) * (2 + 3)^4 * 1e-6 = 24 * 625e-6 = 0.015
  CHECK(root_stability_bound({2.0, 3.0, 1.0}, 0.5, 1e-6) ==
        doctest::Approx(0.015).epsilon(1e-14));
  CHECK_THROWS(root_stability_bound({2.0, 3.0, 1.0}, 0.0, 1e-6));
  CHECK_THROWS(root_stability_bound({2.0, 3.0, 2.0}, 0.5, 1e-6));  // not monic
}

TEST_CASE("random parameter tuples round-trip through the generating function") {
  Rng rng(207);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + static_cast<int>(rng.uniform_below(5));
    std::vector<double> thetas(static_cast<std::size_t>(d));
    for (double& t : thetas) t = 0.05 + 0.9 * rng.uniform01();
    std::sort(thetas.begin(), thetas.end());
    // Nearly coincident parameters make the factorization ill-conditioned by
    // design; the codec's grids keep them ≥ 1/(2d+1) apart, so do the same.
    bool separated = true;
    for (std::size_t i = 0; i + 1 < thetas.size(); ++i) {
      separated = separated && thetas[i + 1] - thetas[i] > 0.05;
    }
    if (!separated) continue;
    const PgfEstimate pgf = poly_roots(bernoulli_sum_pmf(thetas).w);
    REQUIRE(pgf.roots.size() == thetas.size());
    std::vector<double> recovered;
    for (const auto& root : pgf.roots) recovered.push_back(theta_from_root(root));
    std::sort(recovered.begin(), recovered.end());
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      CHECK(recovered[i] == doctest::Approx(thetas[i]).epsilon(1e-9));
    }
  }
}
