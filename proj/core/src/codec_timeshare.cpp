#include "pamac/codec_timeshare.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pamac {

namespace {

/// Binomial coefficient in exact integer arithmetic (small arguments only).
std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t acc = 1;
  for (std::int64_t i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
  return acc;
}

/// multichoose(n, k): k-multisubsets of an n-set.
std::int64_t multichoose(std::int64_t n, std::int64_t k) { return binomial(n + k - 1, k); }

/// Appends, in ascending lexicographic order, every tuple of `parts`
/// non-negative digits ≤ cap summing to `total`.
void enumerate_compositions(int parts, int total, int cap, std::vector<int>& prefix,
                            std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    if (total <= cap) {
      prefix.push_back(total);
      out.push_back(prefix);
      prefix.pop_back();
    }
    return;
  }
  const int hi = std::min(total, cap);
  for (int v = 0; v <= hi; ++v) {
    prefix.push_back(v);
    enumerate_compositions(parts - 1, total - v, cap, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

int SimplexLattice::rank(const std::vector<int>& digit_tuple) const {
  const auto it = std::lower_bound(digits.begin(), digits.end(), digit_tuple);
  if (it == digits.end() || *it != digit_tuple) return -1;
  return static_cast<int>(it - digits.begin());
}

std::vector<Rational> SimplexLattice::point(int r) const {
  const auto& tuple = digits.at(static_cast<std::size_t>(r));
  std::vector<Rational> out;
  out.reserve(tuple.size());
  for (int v : tuple) out.emplace_back(v, denominator);
  return out;
}

SimplexLattice build_lattice(int p, int m, bool is_last) {
  if (p < 2) throw std::invalid_argument("build_lattice: p must be >= 2");
  if (m < 2) throw std::invalid_argument("build_lattice: m must be >= 2");
  SimplexLattice lattice;
  lattice.p = p;
  lattice.m = m;
  lattice.is_last = is_last;
  lattice.denominator = is_last ? m : m - 1;
  // Points summing to 1 are digit tuples summing to the denominator; the last
  // sender's grid stops at (m−1)/m, capping each digit at m−1.
  const int total = lattice.denominator;
  const int cap = is_last ? m - 1 : total;
  std::vector<int> prefix;
  enumerate_compositions(p, total, cap, prefix, lattice.digits);
  return lattice;
}

std::int64_t lattice_size(int p, int m, bool is_last) {
  if (p < 2) throw std::invalid_argument("lattice_size: p must be >= 2");
  if (m < 2) throw std::invalid_argument("lattice_size: m must be >= 2");
  if (!is_last) return multichoose(m, p - 1);
  return multichoose(m + 1, p - 1) - p;
}

std::vector<std::int64_t> apportion_largest_remainder(std::int64_t total,
                                                      const std::vector<std::int64_t>& weights) {
  const std::int64_t wsum = std::accumulate(weights.begin(), weights.end(), std::int64_t{0});
  if (wsum <= 0) throw std::invalid_argument("apportion_largest_remainder: weights must sum > 0");
  const std::size_t k = weights.size();
  std::vector<std::int64_t> sizes(k);
  std::vector<std::pair<std::int64_t, std::size_t>> remainders(k);  // (−remainder, index)
  std::int64_t assigned = 0;
  for (std::size_t b = 0; b < k; ++b) {
    const std::int64_t quota_num = total * weights[b];  // quota = quota_num / wsum
    sizes[b] = quota_num / wsum;
    remainders[b] = {-(quota_num % wsum), b};
    assigned += sizes[b];
  }
  std::sort(remainders.begin(), remainders.end());  // largest remainder first, ties to smaller index
  for (std::int64_t seat = 0; seat < total - assigned; ++seat) {
    ++sizes[remainders[static_cast<std::size_t>(seat)].second];
  }
  return sizes;
}

TimeShareLayout build_layout(std::int64_t n, int d, int p, const RateTuple& rates) {
  if (d < 2) throw std::invalid_argument("build_layout: d must be >= 2");
  if (p < 2) throw std::invalid_argument("build_layout: p must be >= 2");
  if (n <= 0 || n % d != 0) {
    throw std::invalid_argument("build_layout: n must be a positive multiple of d");
  }
  if (static_cast<int>(rates.R.size()) != d) {
    throw std::invalid_argument("build_layout: need one rate per sender");
  }
  TimeShareLayout layout;
  layout.d = d;
  layout.p = p;
  layout.n = n;
  layout.requested = rates;
  layout.segment_len = n / d;
  const double log_n = std::log(static_cast<double>(n));
  for (int i = 0; i < d; ++i) {
    const double rate = rates.R[static_cast<std::size_t>(i)];
    if (!(rate > 0.0)) throw std::invalid_argument("build_layout: rates must be strictly positive");
    // Granularity grows as n^{R_i/(d(p−1))}; rounding to the nearest integer
    // keeps realized rates centered on the requested ones.
    const double raw = std::exp(rate / (d * (p - 1)) * log_n);
    const int m_i = static_cast<int>(std::max<std::int64_t>(2, std::llround(raw)));
    layout.m.push_back(m_i);
    layout.effective_rates.push_back(d * (p - 1) * std::log(static_cast<double>(m_i)) / log_n);
  }
  layout.m_total = 1;
  for (int m_i : layout.m) layout.m_total *= m_i;

  // Subsegment proportions ρ_b = (m_b−1)/∏_{i≤b}m_i (last: m_d/∏m_i); their
  // integer forms r_b = ρ_b·∏m_i telescope to exactly ∏m_i.
  std::vector<std::int64_t> weights(static_cast<std::size_t>(d));
  std::int64_t suffix = layout.m_total;
  for (int b = 0; b < d; ++b) {
    suffix /= layout.m[static_cast<std::size_t>(b)];  // ∏_{i>b} m_i
    weights[static_cast<std::size_t>(b)] =
        b + 1 < d ? (layout.m[static_cast<std::size_t>(b)] - 1) * suffix
                  : layout.m[static_cast<std::size_t>(b)];
    layout.rho.emplace_back(weights[static_cast<std::size_t>(b)], layout.m_total);
  }
  layout.sub_sizes = apportion_largest_remainder(layout.segment_len, weights);

  for (int i = 0; i < d; ++i) {
    layout.lattices.push_back(build_lattice(p, layout.m[static_cast<std::size_t>(i)], i == d - 1));
  }
  return layout;
}

std::int64_t mixed_radix_pack(const std::vector<std::int64_t>& digits, const std::vector<int>& m) {
  if (digits.size() != m.size()) throw std::invalid_argument("mixed_radix_pack: size mismatch");
  std::int64_t value = 0;
  for (std::size_t b = 0; b < m.size(); ++b) {
    if (digits[b] < 0 || digits[b] >= m[b]) {
      throw std::invalid_argument("mixed_radix_pack: digit out of base range");
    }
    value = value * m[b] + digits[b];
  }
  return value;
}

std::vector<std::int64_t> mixed_radix_unpack(std::int64_t value, const std::vector<int>& m) {
  if (value < 0) throw std::invalid_argument("mixed_radix_unpack: value out of range");
  std::vector<std::int64_t> digits(m.size());
  for (std::size_t b = m.size(); b-- > 0;) {
    digits[b] = value % m[b];
    value /= m[b];
  }
  if (value != 0) throw std::invalid_argument("mixed_radix_unpack: value out of range");
  return digits;
}

namespace {

/// Grid value of sender b (zero-based, base m_b) for digit l.
Rational grid_value(std::int64_t l, int m_b, bool last) {
  return last ? Rational(l, m_b) : Rational(l, m_b - 1);
}

/// Digit of a grid value; throws when off-grid.
std::int64_t grid_digit(const Rational& theta, int m_b, bool last) {
  const Rational scaled = theta * Rational(last ? m_b : m_b - 1);
  if (!scaled.is_integer() || scaled.num() < 0 || scaled.num() >= m_b) {
    throw std::invalid_argument("h: value off the sender grid");
  }
  return scaled.num();
}

}  // namespace

Rational h_forward(const std::vector<Rational>& theta, const std::vector<int>& m) {
  if (theta.size() != m.size()) throw std::invalid_argument("h_forward: size mismatch");
  const int d = static_cast<int>(m.size());
  std::vector<std::int64_t> digits(static_cast<std::size_t>(d));
  std::int64_t m_total = 1;
  for (int b = 0; b < d; ++b) {
    digits[static_cast<std::size_t>(b)] =
        grid_digit(theta[static_cast<std::size_t>(b)], m[static_cast<std::size_t>(b)], b == d - 1);
    m_total *= m[static_cast<std::size_t>(b)];
  }
  return {mixed_radix_pack(digits, m), m_total};
}

std::vector<Rational> h_inverse(const Rational& phi, const std::vector<int>& m) {
  const int d = static_cast<int>(m.size());
  std::int64_t m_total = 1;
  for (int m_b : m) m_total *= m_b;
  const Rational scaled = phi * Rational(m_total);
  if (!scaled.is_integer() || scaled.num() < 0 || scaled.num() >= m_total) {
    throw std::invalid_argument("h_inverse: value off the phi grid");
  }
  const std::vector<std::int64_t> digits = mixed_radix_unpack(scaled.num(), m);
  std::vector<Rational> theta(static_cast<std::size_t>(d));
  for (int b = 0; b < d; ++b) {
    theta[static_cast<std::size_t>(b)] =
        grid_value(digits[static_cast<std::size_t>(b)], m[static_cast<std::size_t>(b)], b == d - 1);
  }
  return theta;
}

Codeword encode_timeshare(const TimeShareMessage& message, int sender,
                          const TimeShareLayout& layout, Rng& rng) {
  const int d = layout.d;
  const int p = layout.p;
  if (sender < 0 || sender >= d) throw std::invalid_argument("encode_timeshare: bad sender index");
  if (static_cast<int>(message.size()) != d) {
    throw std::invalid_argument("encode_timeshare: need one lattice rank per segment");
  }
  const SimplexLattice& lattice = layout.lattices[static_cast<std::size_t>(sender)];
  // One categorical CDF per segment, from this sender's lattice point.
  std::vector<std::vector<double>> cdf(static_cast<std::size_t>(d));
  for (int c = 0; c < d; ++c) {
    const int r = message[static_cast<std::size_t>(c)];
    if (r < 0 || r >= static_cast<int>(lattice.size())) {
      throw std::invalid_argument("encode_timeshare: message rank off the lattice");
    }
    const auto& tuple = lattice.digits[static_cast<std::size_t>(r)];
    auto& row = cdf[static_cast<std::size_t>(c)];
    row.resize(static_cast<std::size_t>(p));
    double acc = 0.0;
    for (int k = 0; k < p; ++k) {
      acc += static_cast<double>(tuple[static_cast<std::size_t>(k)]) / lattice.denominator;
      row[static_cast<std::size_t>(k)] = acc;
    }
  }

  Codeword x(static_cast<std::size_t>(layout.n));
  std::size_t j = 0;
  for (int c = 0; c < d; ++c) {    // segment, zero-based (math segment c+1)
    for (int b = 0; b < d; ++b) {  // subsegment position = active sender index
      const std::int64_t len = layout.sub_sizes[static_cast<std::size_t>(b)];
      int value = 0;
      if (sender != b) {
        // Passive constant: with one-based numbers i=sender+1, c1=c+1, the
        // letter is (p−1)·1[i ≤ c1−1] ahead of the active sender and
        // (p−1)·1[i ≤ c1] behind it; both reduce to comparisons below.
        const bool ahead = sender < b ? (sender + 1 <= c) : (sender + 1 <= c + 1);
        value = ahead ? p - 1 : 0;
      }
      if (sender == b) {
        const auto& row = cdf[static_cast<std::size_t>(c)];
        for (std::int64_t t = 0; t < len; ++t) x[j++] = rng.categorical_from_cdf(row);
      } else {
        for (std::int64_t t = 0; t < len; ++t) x[j++] = value;
      }
    }
  }
  return x;
}

DecoderMatrices build_decoder_matrices(const ChannelSpec& spec, const TimeShareLayout& layout) {
  const int d = layout.d;
  const int p = layout.p;
  const int q = spec.q;
  DecoderMatrices mats;
  mats.C1 = DenseMatrix(q, d * p);
  mats.C2 = DenseMatrix(d, d * p);
  for (int c = 0; c < d; ++c) {
    for (int k = 0; k < p; ++k) {
      const int col = c * p + k;
      mats.C1.at(c * (p - 1) + k, col) = 1.0;
      mats.C2.at(c, col) = 1.0;
    }
  }
  mats.C = DenseMatrix(q + d, d * p);
  for (int r = 0; r < q; ++r) {
    for (int col = 0; col < d * p; ++col) mats.C.at(r, col) = mats.C1.at(r, col);
  }
  for (int r = 0; r < d; ++r) {
    for (int col = 0; col < d * p; ++col) mats.C.at(q + r, col) = mats.C2.at(r, col);
  }
  mats.B = DenseMatrix(q + d, q + d);
  for (int r = 0; r < q; ++r) {
    for (int c2 = 0; c2 < q; ++c2) mats.B.at(r, c2) = spec.P.at(c2, r);  // Pᵀ block
  }
  for (int r = 0; r < d; ++r) mats.B.at(q + r, q + r) = 1.0;
  mats.A = multiply(mats.B, mats.C);
  return mats;
}

std::int64_t round_to_phi_digit(double v, std::int64_t m_total) {
  const double scaled = v * static_cast<double>(m_total);
  std::int64_t l = static_cast<std::int64_t>(std::ceil(scaled - 0.5));
  l = std::max<std::int64_t>(0, std::min(m_total - 1, l));
  return l;
}

namespace {

TimeShareDecodeResult assemble_general(const std::vector<double>& phi_tilde,
                                       const TimeShareLayout& layout) {
  const int d = layout.d;
  const int p = layout.p;
  TimeShareDecodeResult result;
  result.phi_tilde = phi_tilde;
  result.phi_digits.resize(phi_tilde.size());
  for (std::size_t idx = 0; idx < phi_tilde.size(); ++idx) {
    result.phi_digits[idx] = round_to_phi_digit(phi_tilde[idx], layout.m_total);
  }
  // Digit of sender i for column (c,k), via the mixed-radix inverse.
  // digits_by_sender[i][c*p+k]
  std::vector<std::vector<std::int64_t>> digits_by_sender(
      static_cast<std::size_t>(d), std::vector<std::int64_t>(static_cast<std::size_t>(d) * p));
  for (int c = 0; c < d; ++c) {
    for (int k = 0; k < p; ++k) {
      const auto digits = mixed_radix_unpack(result.phi_digits[static_cast<std::size_t>(c * p + k)],
                                             layout.m);
      for (int i = 0; i < d; ++i) {
        digits_by_sender[static_cast<std::size_t>(i)][static_cast<std::size_t>(c * p + k)] =
            digits[static_cast<std::size_t>(i)];
      }
    }
  }
  result.message_ranks.assign(static_cast<std::size_t>(d), TimeShareMessage(static_cast<std::size_t>(d)));
  for (int i = 0; i < d; ++i) {
    const SimplexLattice& lattice = layout.lattices[static_cast<std::size_t>(i)];
    for (int c = 0; c < d; ++c) {
      std::vector<int> tuple(static_cast<std::size_t>(p));
      for (int k = 0; k < p; ++k) {
        tuple[static_cast<std::size_t>(k)] = static_cast<int>(
            digits_by_sender[static_cast<std::size_t>(i)][static_cast<std::size_t>(c * p + k)]);
      }
      // The dp scalars were rounded independently, so the reassembled tuple
      // can miss the lattice (entries no longer sum to 1); that is the
      // decoder's declared failure mode.
      const int r = lattice.rank(tuple);
      result.message_ranks[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] = r;
      if (r < 0) result.decode_failed = true;
    }
  }
  return result;
}

}  // namespace

TimeShareDecodeResult decode_timeshare_from_empirical(const Distribution& p_hat,
                                                      const ChannelSpec& spec,
                                                      const TimeShareLayout& layout,
                                                      const DecoderMatrices& matrices) {
  const int d = layout.d;
  const int q = spec.q;
  std::vector<double> b_hat(static_cast<std::size_t>(q + d));
  for (int t = 0; t < q; ++t) b_hat[static_cast<std::size_t>(t)] = d * p_hat.w[static_cast<std::size_t>(t)];
  for (int c = 0; c < d; ++c) b_hat[static_cast<std::size_t>(q + c)] = 1.0;
  const std::vector<double> phi_tilde = least_squares_qr(matrices.A, b_hat);
  return assemble_general(phi_tilde, layout);
}

TimeShareDecodeResult decode_timeshare(const Codeword& y, const ChannelSpec& spec,
                                       const TimeShareLayout& layout) {
  const Distribution p_hat = empirical_distribution(y, spec.q);
  const DecoderMatrices matrices = build_decoder_matrices(spec, layout);
  return decode_timeshare_from_empirical(p_hat, spec, layout, matrices);
}

TimeShareDecodeResult decode_timeshare_binary_from_empirical(const Distribution& p_hat,
                                                             const ChannelSpec& spec,
                                                             const TimeShareLayout& layout) {
  if (layout.p != 2 || spec.p != 2) {
    throw std::invalid_argument("decode_timeshare_binary: requires p = 2");
  }
  const int d = layout.d;
  const int q = spec.q;  // d + 1
  // A's column t (zero-based) is row t+1 of P minus row t, as column vectors.
  DenseMatrix A(q, d);
  for (int t = 0; t < d; ++t) {
    for (int s = 0; s < q; ++s) A.at(s, t) = spec.P.at(t + 1, s) - spec.P.at(t, s);
  }
  std::vector<double> b_hat(static_cast<std::size_t>(q));
  for (int s = 0; s < q; ++s) {
    double base = 0.0;
    for (int t = 0; t < d; ++t) base += spec.P.at(t, s);
    b_hat[static_cast<std::size_t>(s)] = d * p_hat.w[static_cast<std::size_t>(s)] - base;
  }
  const std::vector<double> phi_tilde = least_squares_qr(A, b_hat);

  TimeShareDecodeResult result;
  result.phi_tilde = phi_tilde;
  result.phi_digits.resize(phi_tilde.size());
  result.message_ranks.assign(static_cast<std::size_t>(d), TimeShareMessage(static_cast<std::size_t>(d)));
  for (int c = 0; c < d; ++c) {
    const std::int64_t l = round_to_phi_digit(phi_tilde[static_cast<std::size_t>(c)], layout.m_total);
    result.phi_digits[static_cast<std::size_t>(c)] = l;
    const auto digits = mixed_radix_unpack(l, layout.m);
    for (int i = 0; i < d; ++i) {
      const SimplexLattice& lattice = layout.lattices[static_cast<std::size_t>(i)];
      // Digit is the Bernoulli parameter's grid position (symbol-1 weight);
      // the lattice tuple is its complement-first pair.
      const int l_i = static_cast<int>(digits[static_cast<std::size_t>(i)]);
      const std::vector<int> tuple = {lattice.denominator - l_i, l_i};
      result.message_ranks[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] =
          lattice.rank(tuple);
    }
  }
  return result;
}

TimeShareDecodeResult decode_timeshare_binary(const Codeword& y, const ChannelSpec& spec,
                                              const TimeShareLayout& layout) {
  const Distribution p_hat = empirical_distribution(y, spec.q);
  return decode_timeshare_binary_from_empirical(p_hat, spec, layout);
}

Distribution timeshare_output_marginal(const std::vector<TimeShareMessage>& messages,
                                       const ChannelSpec& spec, const TimeShareLayout& layout) {
  const int d = layout.d;
  const int p = layout.p;
  const int q = spec.q;
  if (static_cast<int>(messages.size()) != d) {
    throw std::invalid_argument("timeshare_output_marginal: need one message per sender");
  }
  std::vector<Distribution> components;
  std::vector<double> weights;
  for (int c = 0; c < d; ++c) {
    for (int b = 0; b < d; ++b) {
      const SimplexLattice& lattice = layout.lattices[static_cast<std::size_t>(b)];
      const int r = messages[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)];
      const auto& tuple = lattice.digits.at(static_cast<std::size_t>(r));
      // Adder output in subsegment (c,b): passive letters contribute the
      // shift c(p−1) (zero-based c), the active letter adds its symbol k.
      Distribution p_w;
      p_w.kind = DistributionKind::exact;
      p_w.w.assign(static_cast<std::size_t>(q), 0.0);
      for (int k = 0; k < p; ++k) {
        p_w.w[static_cast<std::size_t>(c * (p - 1) + k)] +=
            static_cast<double>(tuple[static_cast<std::size_t>(k)]) / lattice.denominator;
      }
      Distribution p_z;
      p_z.kind = DistributionKind::exact;
      p_z.w.assign(static_cast<std::size_t>(q), 0.0);
      for (int s = 0; s < q; ++s) {
        const double mass = p_w.w[static_cast<std::size_t>(s)];
        if (mass == 0.0) continue;
        for (int t = 0; t < q; ++t) p_z.w[static_cast<std::size_t>(t)] += mass * spec.P.at(s, t);
      }
      components.push_back(std::move(p_z));
      weights.push_back(layout.rho[static_cast<std::size_t>(b)].to_double() / d);
    }
  }
  return marginal_y_exact(components, weights);
}

}  // namespace pamac
