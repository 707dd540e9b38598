/// Binary root-recovery codec: each sender signals its message through the
/// parameter of an i.i.d. Bernoulli codeword.  The adder output is then a sum
/// of independent Bernoullis, whose probability generating function factors
/// into linear terms; the decoder recovers the parameters from the roots of
/// the estimated generating function and rounds them onto per-sender grids.

#pragma once

#include <complex>
#include <vector>

#include "pamac/channel.hpp"
#include "pamac/model.hpp"
#include "pamac/rational.hpp"
#include "pamac/rng.hpp"

namespace pamac {

/// Parameter substituted for a root the decoder could not use: it lies
/// outside [0,1] and deterministically rounds to the largest grid point.
inline constexpr double kRootSentinel = 2.0;

/// Per-sender Bernoulli-parameter grids.  Sender i (1-based) owns the
/// subinterval [(2i−1)/(2d+1), 2i/(2d+1)]; its grid spreads sizes[i] points
/// evenly across it.  Grids of distinct senders are separated by ≥ 1/(2d+1),
/// and all points stay clear of 0 and 1 by the same margin.
struct RootCodebook {
  int d = 0;
  std::vector<int> sizes;
  std::vector<std::vector<Rational>> grids;       ///< exact grid values
  std::vector<std::vector<double>> grid_values;   ///< the same, as doubles
};

/// Builds the codebook.  Throws std::invalid_argument when d < 2, the size
/// count differs from d, or any size is < 2.
RootCodebook build_root_codebook(int d, const std::vector<int>& sizes);

/// n i.i.d. Bernoulli(θ) symbols.  Throws when θ ∉ (0,1).
Codeword encode_root(double theta, int n, Rng& rng);

/// Exact PMF of a sum of d independent Bernoulli(θ_i) variables over [0, d],
/// by iterated convolution.  Serves as the oracle for the generating-function
/// factorization.
Distribution bernoulli_sum_pmf(const std::vector<double>& thetas);

/// Roots of the estimated generating function plus diagnostics.
struct PgfEstimate {
  std::vector<double> coeffs;               ///< input coefficients (pseudo-PMF)
  std::vector<std::complex<double>> roots;  ///< roots of the (trimmed) polynomial
  bool degenerate = false;  ///< leading coefficients fell below the trim tolerance
  bool converged = true;    ///< eigensolver converged for every root
  double max_residual = 0.0;  ///< max |G(root)| after polishing
};

/// Roots of coeffs[0] + coeffs[1]·ξ + … via balanced companion-matrix
/// eigenvalues, followed by a Newton polish.  Trailing coefficients smaller
/// than 1e−10·max|coeff| are trimmed first (degenerate flag); the caller is
/// responsible for substituting sentinels for the missing roots.
PgfEstimate poly_roots(const std::vector<double>& coeffs);

/// Maps a root of the generating function back to a Bernoulli parameter,
/// θ = 1/(1 − Re ξ).  Near the pole (|1 − Re ξ| < 1e−12) returns the
/// sentinel.
double theta_from_root(const std::complex<double>& root);

/// Index of the grid value nearest to v; exact ties go to the smaller value.
/// The grid must be non-empty and ascending.
int nearest_grid_index(const std::vector<double>& grid, double v);

/// Decoded messages plus everything needed to audit the decision.
struct RootDecodeResult {
  std::vector<double> thetas;      ///< decoded grid points, one per sender
  std::vector<int> indices;        ///< zero-based grid indices of the decisions
  std::vector<double> raw_thetas;  ///< sorted parameter estimates before rounding
  PgfEstimate pgf;                 ///< root-finding diagnostics
};

/// Decodes from the empirical channel-output distribution given a
/// precomputed kernel inverse (the hot path for sweeps): forms the
/// pseudo-distribution p̂·P⁻¹, factors its generating function, maps roots to
/// parameters, sorts ascending, pads with sentinels to d values, and rounds
/// each onto its sender's grid (ties toward the smaller grid point).
RootDecodeResult decode_root_from_empirical(const Distribution& p_hat, const DenseMatrix& kernel_inverse,
                                            const RootCodebook& codebook);

/// Full decoder: empirical distribution of y, then decode_root_from_empirical
/// with P⁻¹ computed on the fly.  Always returns a guess — noise shows up as
/// wrong messages, never as exceptions.  Requires spec.p == 2.
RootDecodeResult decode_root(const Codeword& y, const ChannelSpec& spec,
                             const RootCodebook& codebook);

/// Analytic root-perturbation bound: for a monic degree-d polynomial with
/// distinct negative real roots separated by at least delta, a coefficient
/// perturbation of size coeff_error moves the (optimally matched) roots by at
/// most ((2d−1)d²/δ^{d−1})·(2 + max_t a_t)^{2d}·coeff_error.  Purely a
/// formula evaluation — no root computation.  monic_coeffs is ascending with
/// leading coefficient 1.  Throws when delta ≤ 0 or the input is not monic.
double root_stability_bound(const std::vector<double>& monic_coeffs, double delta,
                            double coeff_error);

}  // namespace pamac
