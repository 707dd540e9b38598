/// Built-in property suite behind the CLI `verify` subcommand: fast,
/// deterministic spot checks of every invariant the codecs rely on.  Each
/// check returns a verdict plus a human-readable detail line; the heavier
/// exhaustive versions of the same properties live in the test suite.

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "pamac/rational.hpp"

namespace pamac {

struct CheckResult {
  std::string name;
  bool ok = false;
  std::string detail;
};

using RationalMatrix = std::vector<std::vector<Rational>>;

/// Exact Gauss-Jordan inverse over the rationals.  Throws
/// std::invalid_argument when the matrix is not square or is singular.
RationalMatrix exact_inverse(const RationalMatrix& m);

/// The square (dp+1)×(dp+1) extension [e₁ | C] of the general decoder's
/// constraint matrix, whose exact inverse has entries in {−1, 0, 1}.
RationalMatrix padded_constraint_matrix(int d, int p);

/// The square (d+1)×(d+1) extension of the binary decoder's difference
/// matrix: identity with −1 on the superdiagonal; its inverse is the
/// upper-triangular all-ones matrix.
RationalMatrix padded_difference_matrix(int d);

/// Smallest max-root-error over all pairings of estimated roots (real parts)
/// to true roots.  Brute force over permutations; truth.size() ≤ 8.
double matching_distance(const std::vector<double>& truth,
                         const std::vector<std::complex<double>>& estimate);

/// Runs the whole suite with deterministic randomness derived from `seed`.
std::vector<CheckResult> run_selfchecks(std::uint64_t seed);

}  // namespace pamac
