/// Small dense linear-algebra kernel.
///
/// Everything here is textbook-scale (dimensions of a few dozen at most):
/// partial-pivot LU for inversion and square solves, Householder QR for
/// least squares, one-sided Jacobi for singular values, and a balanced
/// double-shift Hessenberg QR iteration for companion-matrix eigenvalues.
/// Clarity is preferred over asymptotic speed throughout.

#pragma once

#include <complex>
#include <vector>

namespace pamac {

/// Row-major dense matrix of doubles.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  static DenseMatrix identity(int n);
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);
std::vector<double> multiply(const DenseMatrix& a, const std::vector<double>& x);

/// max_i Σ_j |a_ij|
double inf_norm(const DenseMatrix& a);
/// max_j Σ_i |a_ij|
double one_norm(const DenseMatrix& a);
double frobenius_norm(const DenseMatrix& a);

/// Inverse by LU with partial pivoting followed by one step of Newton
/// refinement (X ← X(2I − MX)), which keeps the residual ‖M·M⁻¹ − I‖_∞ well
/// below 1e−8·cols for any input this library inverts.  Throws
/// std::invalid_argument on non-square input and std::domain_error when a
/// pivot collapses (numerically singular input).
DenseMatrix invert(const DenseMatrix& m);

/// Solves the square system m·x = b by LU with partial pivoting.
std::vector<double> solve_linear(const DenseMatrix& m, const std::vector<double>& b);

/// Least squares via Householder QR (m ≥ n, full column rank assumed).
std::vector<double> least_squares_qr(const DenseMatrix& a, const std::vector<double>& b);

/// Least squares via the normal equations (AᵀA)x = Aᵀb.  Kept as an
/// independent slower path; decoders cross-check the two in tests.
std::vector<double> least_squares_normal(const DenseMatrix& a, const std::vector<double>& b);

/// Smallest singular value via one-sided Jacobi (intended for dims ≤ 64).
double min_singular_value(const DenseMatrix& a);

/// Eigenvalues of the Frobenius companion matrix of a polynomial.
struct EigenResult {
  std::vector<std::complex<double>> values;
  bool converged = true;  ///< false iff some deflation hit the iteration cap
  int iterations = 0;     ///< total QR iterations spent
};

/// Roots of c_0 + c_1·x + … + c_k·x^k (ascending coefficients, c_k ≠ 0),
/// computed as eigenvalues of the balanced companion matrix.  Each deflation
/// step is capped at max_iterations; on cap the remaining diagonal is
/// returned as-is and `converged` is false (partial results, flagged).
EigenResult companion_eigenvalues(const std::vector<double>& ascending_coeffs,
                                  int max_iterations = 500);

}  // namespace pamac
