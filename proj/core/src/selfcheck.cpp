#include "pamac/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "pamac/channel.hpp"
#include "pamac/codec_root.hpp"
#include "pamac/codec_timeshare.hpp"
#include "pamac/experiment.hpp"
#include "pamac/linalg.hpp"
#include "pamac/model.hpp"
#include "pamac/rng.hpp"

namespace pamac {

namespace {

std::string describe(double got, double want) {
  std::ostringstream os;
  os.precision(15);
  os << "got " << got << ", want " << want;
  return os.str();
}

CheckResult check_pgf_factorization(std::uint64_t seed) {
  CheckResult result{"pgf-factorization-roundtrip", true, ""};
  Rng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < 50 && result.ok; ++trial) {
    const int d = 2 + static_cast<int>(rng.uniform_below(5));
    std::vector<double> thetas(static_cast<std::size_t>(d));
    for (double& t : thetas) t = 0.05 + 0.9 * rng.uniform01();
    std::sort(thetas.begin(), thetas.end());

    const Distribution pmf = bernoulli_sum_pmf(thetas);
    const PgfEstimate pgf = poly_roots(pmf.w);
    std::vector<double> recovered;
    for (const auto& root : pgf.roots) recovered.push_back(theta_from_root(root));
    std::sort(recovered.begin(), recovered.end());
    if (recovered.size() != thetas.size()) {
      result.ok = false;
      result.detail = "lost a root at d=" + std::to_string(d);
      break;
    }
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      worst = std::max(worst, std::abs(recovered[i] - thetas[i]));
    }
    if (worst > 1e-8) {
      result.ok = false;
      result.detail = "parameter error " + std::to_string(worst) + " at d=" + std::to_string(d);
    }
  }
  if (result.ok) result.detail = "50 tuples, max parameter error " + std::to_string(worst);
  return result;
}

CheckResult check_scalar_packing() {
  CheckResult result{"scalar-packing-bijection", true, ""};
  const std::vector<std::vector<int>> tuples = {{3, 4}, {2, 3, 2}};
  int count = 0;
  for (const auto& m : tuples) {
    const int d = static_cast<int>(m.size());
    std::int64_t total = 1;
    for (int mi : m) total *= mi;
    for (std::int64_t v = 0; v < total; ++v) {
      const std::vector<std::int64_t> digits = mixed_radix_unpack(v, m);
      if (mixed_radix_pack(digits, m) != v) {
        result.ok = false;
        result.detail = "digit packing failed at value " + std::to_string(v);
        return result;
      }
      std::vector<Rational> theta(static_cast<std::size_t>(d));
      for (int b = 0; b < d; ++b) {
        const int denom = b + 1 < d ? m[static_cast<std::size_t>(b)] - 1 : m[static_cast<std::size_t>(b)];
        theta[static_cast<std::size_t>(b)] =
            Rational(digits[static_cast<std::size_t>(b)], denom);
      }
      const Rational phi = h_forward(theta, m);
      const std::vector<Rational> back = h_inverse(phi, m);
      if (back != theta) {
        result.ok = false;
        result.detail = "grid-value round trip failed at value " + std::to_string(v);
        return result;
      }
      ++count;
    }
  }
  // Two hand-checked anchor cells of the m=(3,4) table.
  const std::vector<int> m34 = {3, 4};
  if (h_forward({Rational(1, 2), Rational(2, 4)}, m34) != Rational(6, 12) ||
      h_forward({Rational(2, 2), Rational(3, 4)}, m34) != Rational(11, 12)) {
    result.ok = false;
    result.detail = "anchor cells of the (3,4) table are wrong";
    return result;
  }
  result.detail = std::to_string(count) + " grid tuples round-tripped exactly";
  return result;
}

CheckResult check_lattice_cardinality() {
  CheckResult result{"lattice-cardinality", true, ""};
  int combos = 0;
  for (int p = 2; p <= 4; ++p) {
    for (int m = 2; m <= 8; ++m) {
      for (bool is_last : {false, true}) {
        const SimplexLattice lattice = build_lattice(p, m, is_last);
        if (lattice.size() != lattice_size(p, m, is_last)) {
          result.ok = false;
          result.detail = "count mismatch at p=" + std::to_string(p) + " m=" + std::to_string(m) +
                          (is_last ? " (last)" : "");
          return result;
        }
        ++combos;
      }
    }
  }
  if (lattice_size(2, 3, false) != 3 || lattice_size(2, 2, true) != 1 ||
      lattice_size(3, 7, false) != 28) {
    result.ok = false;
    result.detail = "spot cardinalities are wrong";
    return result;
  }
  result.detail = std::to_string(combos) + " (p, m, last) combinations match the closed form";
  return result;
}

CheckResult check_subsegment_proportions(std::uint64_t seed) {
  CheckResult result{"subsegment-proportions", true, ""};
  Rng rng(seed);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + static_cast<int>(rng.uniform_below(5));
    const int p = 2;
    const std::int64_t n = 1200 * d;
    std::vector<int> m(static_cast<std::size_t>(d));
    RateTuple rates;
    for (int i = 0; i < d; ++i) {
      m[static_cast<std::size_t>(i)] = 2 + static_cast<int>(rng.uniform_below(8));
      rates.R.push_back(d * (p - 1) * std::log(m[static_cast<std::size_t>(i)]) /
                        std::log(static_cast<double>(n)));
    }
    const TimeShareLayout layout = build_layout(n, d, p, rates);
    if (layout.m != m) {
      result.ok = false;
      result.detail = "granularity inversion failed in trial " + std::to_string(trial);
      return result;
    }
    Rational total(0);
    for (const Rational& r : layout.rho) total = total + r;
    if (!(total == Rational(1))) {
      result.ok = false;
      result.detail = "proportions sum to " + total.str() + " in trial " + std::to_string(trial);
      return result;
    }
    std::int64_t seats = 0;
    for (std::size_t b = 0; b < layout.sub_sizes.size(); ++b) {
      seats += layout.sub_sizes[b];
      if (b > 0 && layout.sub_sizes[b] > layout.sub_sizes[b - 1]) {
        result.ok = false;
        result.detail = "subsegment sizes increased in trial " + std::to_string(trial);
        return result;
      }
    }
    if (seats != layout.segment_len) {
      result.ok = false;
      result.detail = "subsegments do not tile the segment in trial " + std::to_string(trial);
      return result;
    }
  }
  result.detail = "100 random granularity tuples, exact unit sum and monotone tiling";
  return result;
}

CheckResult check_output_marginal() {
  CheckResult result{"output-marginal-mixture", true, ""};
  const ChannelSpec spec = default_channel(2, 3, 0.1);
  RateTuple rates;
  rates.R = {0.6, 0.6};
  const TimeShareLayout layout = build_layout(60, 2, 3, rates);
  const std::vector<TimeShareMessage> messages = {{0, 2}, {1, 0}};
  const Distribution marginal = timeshare_output_marginal(messages, spec, layout);
  if (static_cast<int>(marginal.w.size()) != spec.q) {
    result.ok = false;
    result.detail = "marginal has the wrong alphabet";
    return result;
  }
  if (std::abs(marginal.sum() - 1.0) > 1e-12 ||
      *std::min_element(marginal.w.begin(), marginal.w.end()) < 0.0) {
    result.ok = false;
    result.detail = "marginal is not a distribution: " + describe(marginal.sum(), 1.0);
    return result;
  }
  result.detail = "mixture marginal is an exact distribution, " + describe(marginal.sum(), 1.0);
  return result;
}

CheckResult check_exact_statistics() {
  CheckResult result{"exact-statistics-decoding", true, ""};
  int decoded = 0;

  {  // General decoder, p = 3.
    const ChannelSpec spec = default_channel(2, 3, 0.1);
    RateTuple rates;
    rates.R = {0.6, 0.6};
    const TimeShareLayout layout = build_layout(60, 2, 3, rates);
    const DecoderMatrices matrices = build_decoder_matrices(spec, layout);
    const auto s0 = layout.lattices[0].size();
    const auto s1 = layout.lattices[1].size();
    for (int a0 = 0; a0 < s0; ++a0) {
      for (int a1 = 0; a1 < s0; ++a1) {
        for (int b0 = 0; b0 < s1; ++b0) {
          for (int b1 = 0; b1 < s1; ++b1) {
            const std::vector<TimeShareMessage> msgs = {{a0, a1}, {b0, b1}};
            const Distribution marginal = timeshare_output_marginal(msgs, spec, layout);
            const TimeShareDecodeResult out =
                decode_timeshare_from_empirical(marginal, spec, layout, matrices);
            if (out.decode_failed || out.message_ranks != msgs) {
              result.ok = false;
              result.detail = "general decoder missed an exact-statistics tuple";
              return result;
            }
            ++decoded;
          }
        }
      }
    }
  }

  {  // Binary decoder, p = 2.
    const ChannelSpec spec = default_channel(2, 2, 0.1);
    RateTuple rates;
    rates.R = {0.6, 0.6};
    const TimeShareLayout layout = build_layout(40, 2, 2, rates);
    const auto s0 = layout.lattices[0].size();
    const auto s1 = layout.lattices[1].size();
    for (int a0 = 0; a0 < s0; ++a0) {
      for (int a1 = 0; a1 < s0; ++a1) {
        for (int b0 = 0; b0 < s1; ++b0) {
          for (int b1 = 0; b1 < s1; ++b1) {
            const std::vector<TimeShareMessage> msgs = {{a0, a1}, {b0, b1}};
            const Distribution marginal = timeshare_output_marginal(msgs, spec, layout);
            const TimeShareDecodeResult out =
                decode_timeshare_binary_from_empirical(marginal, spec, layout);
            if (out.message_ranks != msgs) {
              result.ok = false;
              result.detail = "binary decoder missed an exact-statistics tuple";
              return result;
            }
            ++decoded;
          }
        }
      }
    }
  }

  {  // Root decoder.
    const ChannelSpec spec = default_channel(2, 2, 0.1);
    const RootCodebook codebook = build_root_codebook(2, {3, 3});
    const DenseMatrix kernel_inverse = invert(spec.P);
    for (int i0 = 0; i0 < 3; ++i0) {
      for (int i1 = 0; i1 < 3; ++i1) {
        const std::vector<double> thetas = {codebook.grid_values[0][static_cast<std::size_t>(i0)],
                                            codebook.grid_values[1][static_cast<std::size_t>(i1)]};
        const Distribution p_w = bernoulli_sum_pmf(thetas);
        Distribution p_z;
        p_z.w.assign(static_cast<std::size_t>(spec.q), 0.0);
        for (int s = 0; s < spec.q; ++s) {
          for (int w = 0; w < spec.q; ++w) {
            p_z.w[static_cast<std::size_t>(s)] +=
                p_w.w[static_cast<std::size_t>(w)] * spec.P.at(w, s);
          }
        }
        const RootDecodeResult out = decode_root_from_empirical(p_z, kernel_inverse, codebook);
        if (out.indices != std::vector<int>{i0, i1}) {
          result.ok = false;
          result.detail = "root decoder missed an exact-statistics tuple";
          return result;
        }
        ++decoded;
      }
    }
  }

  result.detail = std::to_string(decoded) + " exact-statistics message tuples recovered";
  return result;
}

CheckResult check_constraint_matrix_inverse() {
  CheckResult result{"constraint-matrix-inverse", true, ""};
  for (int d = 2; d <= 3; ++d) {
    for (int p = 2; p <= 3; ++p) {
      const RationalMatrix inverse = exact_inverse(padded_constraint_matrix(d, p));
      for (const auto& row : inverse) {
        for (const Rational& entry : row) {
          if (!(entry == Rational(0) || entry == Rational(1) || entry == Rational(-1))) {
            result.ok = false;
            result.detail = "general inverse entry " + entry.str() + " at d=" +
                            std::to_string(d) + " p=" + std::to_string(p);
            return result;
          }
        }
      }
    }
  }
  for (int d = 2; d <= 5; ++d) {
    const RationalMatrix inverse = exact_inverse(padded_difference_matrix(d));
    for (std::size_t i = 0; i < inverse.size(); ++i) {
      for (std::size_t j = 0; j < inverse.size(); ++j) {
        const Rational want = j >= i ? Rational(1) : Rational(0);
        if (!(inverse[i][j] == want)) {
          result.ok = false;
          result.detail = "difference-matrix inverse is not upper-triangular ones at d=" +
                          std::to_string(d);
          return result;
        }
      }
    }
  }
  result.detail = "all padded-matrix inverses have unit-magnitude entries";
  return result;
}

CheckResult check_kernel_conditioning(std::uint64_t seed) {
  CheckResult result{"kernel-conditioning", true, ""};
  double previous = 2.0;
  for (double eps : {0.1, 0.2, 0.3, 0.5, 0.7, 0.9}) {
    const ChannelSpec spec = default_channel(2, 2, eps);
    const ChannelValidation report = validate_channel(spec);
    if (!report.ok) {
      result.ok = false;
      result.detail = "mixing channel rejected at eps=" + std::to_string(eps);
      return result;
    }
    if (std::abs(report.sigma_min - (1.0 - eps)) > 1e-9) {
      result.ok = false;
      result.detail = "mixing-channel sigma_min " + describe(report.sigma_min, 1.0 - eps);
      return result;
    }
    if (report.sigma_min >= previous) {
      result.ok = false;
      result.detail = "sigma_min failed to decrease in the noise level";
      return result;
    }
    previous = report.sigma_min;
  }

  // Appending a column to a tall matrix must not increase sigma_min.
  Rng rng(seed);
  for (int trial = 0; trial < 25; ++trial) {
    const int rows = 4 + static_cast<int>(rng.uniform_below(5));
    const int cols = 2 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(rows - 3)));
    DenseMatrix narrow(rows, cols);
    DenseMatrix wide(rows, cols + 1);
    const int insert_at = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(cols + 1)));
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c <= cols; ++c) wide.at(r, c) = 2.0 * rng.uniform01() - 1.0;
      int k = 0;
      for (int c = 0; c <= cols; ++c) {
        if (c != insert_at) narrow.at(r, k++) = wide.at(r, c);
      }
    }
    const double s_narrow = min_singular_value(narrow);
    const double s_wide = min_singular_value(wide);
    if (s_wide > s_narrow + 1e-10) {
      result.ok = false;
      result.detail = "column append raised sigma_min: " + describe(s_wide, s_narrow);
      return result;
    }
  }
  result.detail = "mixing kernels and 25 random column appends behave as expected";
  return result;
}

CheckResult check_tail_bounds() {
  CheckResult result{"tail-bound-values", true, ""};
  const double h = hoeffding_bound(100, 0.1);
  if (std::abs(h - 0.2706705664732254) > 1e-15) {
    result.ok = false;
    result.detail = "hoeffding " + describe(h, 0.2706705664732254);
    return result;
  }
  const double n = 1000.0;
  const double tuned = hoeffding_bound(1000, std::sqrt(std::log(n) / n));
  if (std::abs(tuned - 2.0 / (n * n)) > 1e-18) {
    result.ok = false;
    result.detail = "tuned hoeffding " + describe(tuned, 2.0 / (n * n));
    return result;
  }
  const double envelope = analytic_error_envelope(default_channel(2, 2, 0.3), 1000);
  if (std::abs(envelope - 6e-6) > 1e-18) {
    result.ok = false;
    result.detail = "envelope " + describe(envelope, 6e-6);
    return result;
  }
  result.detail = "closed-form tail bounds match hand-computed values";
  return result;
}

CheckResult check_root_perturbation_bound(std::uint64_t seed) {
  CheckResult result{"root-perturbation-bound", true, ""};
  Rng rng(seed);
  double tightest = 1e300;
  for (int trial = 0; trial < 20; ++trial) {
    // Three negative roots separated by at least 0.5.
    std::vector<double> roots(3);
    roots[0] = -(0.1 + 0.9 * rng.uniform01());
    roots[1] = roots[0] - 0.5 - 0.5 * rng.uniform01();
    roots[2] = roots[1] - 0.5 - 0.5 * rng.uniform01();
    std::sort(roots.begin(), roots.end());

    std::vector<double> coeffs = {1.0};  // ascending after the loop below
    for (double r : roots) {
      std::vector<double> next(coeffs.size() + 1, 0.0);
      for (std::size_t i = 0; i < coeffs.size(); ++i) {
        next[i] += coeffs[i] * (-r);
        next[i + 1] += coeffs[i];
      }
      coeffs = next;
    }

    std::vector<double> perturbed = coeffs;
    double coeff_error = 0.0;
    for (std::size_t i = 0; i + 1 < perturbed.size(); ++i) {
      const double delta = (2.0 * rng.uniform01() - 1.0) * 1e-6;
      perturbed[i] += delta;
      coeff_error = std::max(coeff_error, std::abs(delta));
    }

    const PgfEstimate estimate = poly_roots(perturbed);
    const double distance = matching_distance(roots, estimate.roots);
    const double bound = root_stability_bound(coeffs, 0.5, coeff_error);
    if (distance > bound) {
      result.ok = false;
      result.detail = "matching distance " + describe(distance, bound);
      return result;
    }
    if (distance > 0.0) tightest = std::min(tightest, bound / distance);
  }
  std::ostringstream os;
  os.precision(3);
  os << "20 perturbation trials inside the bound (slack factor >= " << tightest << ")";
  result.detail = os.str();
  return result;
}

CheckResult check_channel_validation() {
  CheckResult result{"channel-validation", true, ""};
  const ChannelValidation good = validate_channel(default_channel(3, 2, 0.25));
  if (!good.ok) {
    result.ok = false;
    result.detail = "mixing channel flagged as invalid";
    return result;
  }
  ChannelSpec broken = default_channel(2, 2, 0.25);
  broken.P.at(0, 0) += 0.5;  // row no longer sums to one
  if (validate_channel(broken).ok) {
    result.ok = false;
    result.detail = "non-stochastic row accepted";
    return result;
  }
  ChannelSpec singular = default_channel(2, 2, 0.25);
  for (int c = 0; c < singular.q; ++c) {
    singular.P.at(1, c) = singular.P.at(0, c);  // repeated row: not invertible
  }
  if (validate_channel(singular).ok) {
    result.ok = false;
    result.detail = "singular kernel accepted";
    return result;
  }
  result.detail = "valid kernels pass, broken kernels are rejected with reasons";
  return result;
}

}  // namespace

RationalMatrix exact_inverse(const RationalMatrix& m) {
  const std::size_t n = m.size();
  if (n == 0) throw std::invalid_argument("exact_inverse: empty matrix");
  for (const auto& row : m) {
    if (row.size() != n) throw std::invalid_argument("exact_inverse: matrix is not square");
  }
  RationalMatrix work = m;
  RationalMatrix inverse(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) inverse[i][i] = Rational(1);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && work[pivot][col] == Rational(0)) ++pivot;
    if (pivot == n) throw std::invalid_argument("exact_inverse: matrix is singular");
    std::swap(work[pivot], work[col]);
    std::swap(inverse[pivot], inverse[col]);

    const Rational lead = work[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      work[col][j] = work[col][j] / lead;
      inverse[col][j] = inverse[col][j] / lead;
    }
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col || work[row][col] == Rational(0)) continue;
      const Rational factor = work[row][col];
      for (std::size_t j = 0; j < n; ++j) {
        work[row][j] = work[row][j] - factor * work[col][j];
        inverse[row][j] = inverse[row][j] - factor * inverse[col][j];
      }
    }
  }
  return inverse;
}

RationalMatrix padded_constraint_matrix(int d, int p) {
  if (d < 2 || p < 2) throw std::invalid_argument("padded_constraint_matrix: need d, p >= 2");
  const int q = d * (p - 1) + 1;
  const int size = d * p + 1;
  RationalMatrix mat(static_cast<std::size_t>(size),
                     std::vector<Rational>(static_cast<std::size_t>(size), Rational(0)));
  mat[0][0] = Rational(1);  // the padding column
  for (int c = 1; c <= d; ++c) {
    for (int k = 0; k < p; ++k) {
      const int col = 1 + (c - 1) * p + k;
      const int s1 = (c - 1) * (p - 1) + k;  // symbol row selected by this pair
      mat[static_cast<std::size_t>(s1)][static_cast<std::size_t>(col)] = Rational(1);
      mat[static_cast<std::size_t>(q + c - 1)][static_cast<std::size_t>(col)] = Rational(1);
    }
  }
  return mat;
}

RationalMatrix padded_difference_matrix(int d) {
  if (d < 2) throw std::invalid_argument("padded_difference_matrix: need d >= 2");
  const int size = d + 1;
  RationalMatrix mat(static_cast<std::size_t>(size),
                     std::vector<Rational>(static_cast<std::size_t>(size), Rational(0)));
  for (int i = 0; i < size; ++i) {
    mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = Rational(1);
    if (i + 1 < size) {
      mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(i + 1)] = Rational(-1);
    }
  }
  return mat;
}

double matching_distance(const std::vector<double>& truth,
                         const std::vector<std::complex<double>>& estimate) {
  if (truth.size() != estimate.size()) {
    throw std::invalid_argument("matching_distance: size mismatch");
  }
  if (truth.size() > 8) {
    throw std::invalid_argument("matching_distance: brute force capped at 8 roots");
  }
  std::vector<std::size_t> perm(truth.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = 1e300;
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      worst = std::max(worst, std::abs(estimate[perm[i]].real() - truth[i]));
    }
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<CheckResult> run_selfchecks(std::uint64_t seed) {
  std::vector<CheckResult> results;
  results.push_back(check_pgf_factorization(derive_seed(seed, 1)));
  results.push_back(check_scalar_packing());
  results.push_back(check_lattice_cardinality());
  results.push_back(check_subsegment_proportions(derive_seed(seed, 2)));
  results.push_back(check_output_marginal());
  results.push_back(check_exact_statistics());
  results.push_back(check_constraint_matrix_inverse());
  results.push_back(check_kernel_conditioning(derive_seed(seed, 3)));
  results.push_back(check_tail_bounds());
  results.push_back(check_root_perturbation_bound(derive_seed(seed, 4)));
  results.push_back(check_channel_validation());
  return results;
}

}  // namespace pamac
