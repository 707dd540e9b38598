/// General time-sharing codec: each sender's message is a tuple of points on
/// a simplex lattice (one categorical PMF per segment).  The blocklength is
/// split into d segments of d subsegments; in each subsegment exactly one
/// sender is active (sampling i.i.d. from its segment PMF) while the others
/// hold constants that shift the adder output into a segment-specific window.
/// A mixed-radix map packs the d senders' grid values into one scalar per
/// (segment, symbol) pair, which the decoder recovers by least squares from
/// the output's empirical distribution and then unpacks digit by digit.
///
/// Sender, segment, and subsegment indices are zero-based throughout the API;
/// mathematical descriptions in comments use the matching one-based numbers
/// where that reads more naturally.

#pragma once

#include <cstdint>
#include <vector>

#include "pamac/channel.hpp"
#include "pamac/model.hpp"
#include "pamac/rational.hpp"
#include "pamac/rng.hpp"

namespace pamac {

/// All p-vectors with entries on a sender's grid that sum to exactly 1.
/// Non-last senders use the grid {0, 1/(m−1), …, 1}; the last sender uses
/// {0, 1/m, …, (m−1)/m}.  Points are stored as integer digit tuples over the
/// common denominator, enumerated in ascending lexicographic order; that
/// order defines the external message rank.
struct SimplexLattice {
  int p = 0;
  int m = 0;
  bool is_last = false;
  int denominator = 0;  ///< m−1 for non-last senders, m for the last one
  std::vector<std::vector<int>> digits;  ///< digits[r][k]/denominator = k-th entry of point r

  std::int64_t size() const { return static_cast<std::int64_t>(digits.size()); }

  /// Lexicographic rank of a digit tuple, or −1 when it is not a lattice
  /// point (wrong sum or out-of-range digit).
  int rank(const std::vector<int>& digit_tuple) const;

  /// Point r as exact rationals.
  std::vector<Rational> point(int r) const;
};

/// Enumerates the lattice.  Throws std::invalid_argument when m < 2 or p < 2.
SimplexLattice build_lattice(int p, int m, bool is_last);

/// Closed-form lattice cardinality: multichoose(m, p−1) for non-last senders
/// and multichoose(m+1, p−1) − p for the last one.  Always equals
/// build_lattice(p, m, is_last).size().
std::int64_t lattice_size(int p, int m, bool is_last);

/// Largest-remainder apportionment of `total` seats to integer weights:
/// sizes are proportional to weights, rounded down, with leftover seats going
/// to the largest fractional remainders (ties to the smaller index).
/// Σ sizes = total exactly.
std::vector<std::int64_t> apportion_largest_remainder(std::int64_t total,
                                                      const std::vector<std::int64_t>& weights);

/// Blocklength partition and per-sender lattices for one (n, d, p, R) choice.
struct TimeShareLayout {
  int d = 0;
  int p = 0;
  std::int64_t n = 0;
  std::vector<int> m;                      ///< lattice granularity per sender
  std::int64_t m_total = 0;                ///< ∏ m_i, the mixed-radix modulus
  std::vector<Rational> rho;               ///< subsegment proportions, Σρ_b = 1 exactly
  std::int64_t segment_len = 0;            ///< n/d
  std::vector<std::int64_t> sub_sizes;     ///< |J_{c,b}| per subsegment position b (same for every segment)
  std::vector<SimplexLattice> lattices;    ///< per-sender message lattices
  RateTuple requested;                     ///< the rate tuple the layout was built for
  std::vector<double> effective_rates;     ///< d(p−1)·log m_i / log n actually realized
};

/// Chooses granularities m_i = max(2, round(n^{R_i/(d(p−1))})), enumerates
/// the lattices, and apportions each segment of length n/d into d subsegments
/// with proportions ρ_b = (m_b−1)/∏_{i≤b}m_i (last: m_d/∏m_i).  Requires n a
/// positive multiple of d and every R_i > 0.  Out-of-region rate tuples are
/// accepted on purpose — they are legitimate negative experiments; region
/// classification is reported by the experiment layer instead.
TimeShareLayout build_layout(std::int64_t n, int d, int p, const RateTuple& rates);

/// Packs mixed-radix digits (most significant first, digit b in base m_b)
/// into a single integer; inverse of mixed_radix_unpack.
std::int64_t mixed_radix_pack(const std::vector<std::int64_t>& digits, const std::vector<int>& m);
std::vector<std::int64_t> mixed_radix_unpack(std::int64_t value, const std::vector<int>& m);

/// The scalar φ = Σ_b ρ_b·θ_b ∈ Φ = {ℓ/∏m_i} encoding one grid value per
/// sender.  Exact; throws std::invalid_argument when some θ_b is off its
/// sender's grid.
Rational h_forward(const std::vector<Rational>& theta, const std::vector<int>& m);

/// Exact inverse of h_forward: recovers every sender's grid value from φ by
/// integer digit extraction.  Throws when φ is not on the Φ grid.
std::vector<Rational> h_inverse(const Rational& phi, const std::vector<int>& m);

/// One sender's message: its lattice-point rank for each of the d segments.
using TimeShareMessage = std::vector<int>;

/// Encodes sender `sender`'s (zero-based) message into its length-n codeword.
/// In segment c it is active in subsegment b = sender: letters are i.i.d.
/// categorical draws from its segment-c lattice point.  Everywhere else it
/// holds the passive constant — (p−1) for the first c−1 senders ahead of the
/// active one and for senders behind it up to index c, 0 otherwise — so the
/// passive letters in segment c always sum to (c−1)(p−1).
Codeword encode_timeshare(const TimeShareMessage& message, int sender,
                          const TimeShareLayout& layout, Rng& rng);

/// Nearest Φ-grid digit to v: round(v·m_total) with half-ties toward the
/// smaller value, clamped into [0, m_total−1].
std::int64_t round_to_phi_digit(double v, std::int64_t m_total);

/// The linear system the general decoder solves.  Columns of C1/C2/C/A are
/// indexed by (segment c, symbol k) as column (c−1)·p + k with k zero-based.
struct DecoderMatrices {
  DenseMatrix C1;  ///< q×dp: [C1]_{s,(c,k)} = 1 iff s = (c−1)(p−1)+k
  DenseMatrix C2;  ///< d×dp: [C2]_{s,(c,k)} = 1 iff c = s (sum-to-one rows)
  DenseMatrix C;   ///< (dp+1)×dp: [C1; C2] stacked
  DenseMatrix B;   ///< (dp+1)×(dp+1): block-diagonal [Pᵀ, 0; 0, I_d]
  DenseMatrix A;   ///< (dp+1)×dp: B·C = [PᵀC1; C2], full column rank
};

DecoderMatrices build_decoder_matrices(const ChannelSpec& spec, const TimeShareLayout& layout);

/// Decoder output.  message_ranks[i][c] is sender i's decoded lattice rank
/// for segment c, or −1 when the reassembled tuple is not a lattice point.
struct TimeShareDecodeResult {
  std::vector<TimeShareMessage> message_ranks;  ///< [sender][segment]
  bool decode_failed = false;  ///< general decoder only: some tuple left its lattice
  std::vector<double> phi_tilde;        ///< raw least-squares solution
  std::vector<std::int64_t> phi_digits; ///< φ̃ rounded onto the Φ grid, as digits
};

/// General decoder: empirical distribution p̂_Y; right-hand side
/// b̂ = [d·p̂_Yᵀ; 1_d]; least-squares solve of A·φ = b̂; per-entry rounding
/// onto Φ (ties toward the smaller value); digit unpacking; per-sender
/// reassembly.  decode_failed is set iff some sender/segment tuple is off its
/// lattice — reachable because the dp entries are rounded independently.
TimeShareDecodeResult decode_timeshare(const Codeword& y, const ChannelSpec& spec,
                                       const TimeShareLayout& layout);

/// Hot-path variant taking the empirical distribution and prebuilt matrices.
TimeShareDecodeResult decode_timeshare_from_empirical(const Distribution& p_hat,
                                                      const ChannelSpec& spec,
                                                      const TimeShareLayout& layout,
                                                      const DecoderMatrices& matrices);

/// Binary specialization (p = 2 only): solves the smaller d-unknown system
/// built from the (d+1)×d difference matrix [C]_{s,t} = 1{s=t+1} − 1{s=t},
/// A = PᵀC, b̂ = d·p̂_Yᵀ − Σ_{t<d} (row t of P).  One φ per segment; digits
/// map to Bernoulli parameters directly.  No failure flag: every rounded φ̂
/// yields a parameter tuple, though the last sender's parameter 0 has no
/// lattice point and then decodes as rank −1 (a guaranteed miss).
TimeShareDecodeResult decode_timeshare_binary(const Codeword& y, const ChannelSpec& spec,
                                              const TimeShareLayout& layout);
TimeShareDecodeResult decode_timeshare_binary_from_empirical(const Distribution& p_hat,
                                                             const ChannelSpec& spec,
                                                             const TimeShareLayout& layout);

/// Exact per-letter output marginal for the given messages under the ideal
/// subsegment proportions ρ_b/d: the mixture Σ_{c,b} (ρ_b/d)·p_{Z,c,b} with
/// p_{W,c,b} the shifted categorical of the active sender.  Feeding this to
/// the from-empirical decoders must recover the messages exactly.
Distribution timeshare_output_marginal(const std::vector<TimeShareMessage>& messages,
                                       const ChannelSpec& spec, const TimeShareLayout& layout);

}  // namespace pamac
