#include "pamac/codec_root.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pamac {

namespace {

constexpr double kTrimTolerance = 1e-10;   // relative leading-coefficient trim
constexpr double kPoleTolerance = 1e-12;   // |1 − Re ξ| below this → sentinel

std::complex<double> eval_poly(const std::vector<double>& coeffs, std::complex<double> x) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * x + coeffs[k];
  return acc;
}

std::complex<double> eval_dpoly(const std::vector<double>& coeffs, std::complex<double> x) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * x + coeffs[k] * static_cast<double>(k);
  return acc;
}

}  // namespace

RootCodebook build_root_codebook(int d, const std::vector<int>& sizes) {
  if (d < 2) throw std::invalid_argument("build_root_codebook: d must be >= 2");
  if (static_cast<int>(sizes.size()) != d) {
    throw std::invalid_argument("build_root_codebook: need one grid size per sender");
  }
  RootCodebook cb;
  cb.d = d;
  cb.sizes = sizes;
  cb.grids.resize(static_cast<std::size_t>(d));
  cb.grid_values.resize(static_cast<std::size_t>(d));
  const Rational width(1, 2 * d + 1);
  for (int i = 1; i <= d; ++i) {
    const int size = sizes[static_cast<std::size_t>(i - 1)];
    if (size < 2) throw std::invalid_argument("build_root_codebook: every grid needs >= 2 points");
    const Rational left(2 * i - 1, 2 * d + 1);
    auto& grid = cb.grids[static_cast<std::size_t>(i - 1)];
    auto& values = cb.grid_values[static_cast<std::size_t>(i - 1)];
    for (int l = 1; l <= size; ++l) {
      const Rational theta = left + Rational(l - 1, size - 1) * width;
      grid.push_back(theta);
      values.push_back(theta.to_double());
    }
  }
  return cb;
}

Codeword encode_root(double theta, int n, Rng& rng) {
  if (!(theta > 0.0) || !(theta < 1.0)) {
    throw std::invalid_argument("encode_root: parameter must lie strictly in (0,1)");
  }
  Codeword x(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = rng.bernoulli(theta);
  return x;
}

Distribution bernoulli_sum_pmf(const std::vector<double>& thetas) {
  Distribution out;
  out.kind = DistributionKind::exact;
  out.w = {1.0};
  for (double theta : thetas) {
    if (theta < 0.0 || theta > 1.0) {
      throw std::invalid_argument("bernoulli_sum_pmf: parameter outside [0,1]");
    }
    std::vector<double> next(out.w.size() + 1, 0.0);
    for (std::size_t t = 0; t < out.w.size(); ++t) {
      next[t] += out.w[t] * (1.0 - theta);
      next[t + 1] += out.w[t] * theta;
    }
    out.w = std::move(next);
  }
  return out;
}

PgfEstimate poly_roots(const std::vector<double>& coeffs) {
  PgfEstimate est;
  est.coeffs = coeffs;
  double cmax = 0.0;
  for (double c : coeffs) cmax = std::max(cmax, std::abs(c));
  if (cmax == 0.0) {
    est.degenerate = true;
    return est;
  }
  // Trim trailing coefficients that are numerically zero relative to the
  // largest one; the polynomial degree drops accordingly.
  std::size_t degree = coeffs.size() - 1;
  while (degree > 0 && std::abs(coeffs[degree]) < kTrimTolerance * cmax) --degree;
  est.degenerate = degree != coeffs.size() - 1;
  if (degree == 0) return est;

  std::vector<double> trimmed(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(degree) + 1);
  const EigenResult eig = companion_eigenvalues(trimmed);
  est.converged = eig.converged;
  est.roots = eig.values;
  // Newton polish: a few corrector steps per root, kept only while they
  // shrink |G(ξ)|; repairs the last digits the eigensolver leaves behind.
  for (auto& root : est.roots) {
    std::complex<double> x = root;
    double best = std::abs(eval_poly(trimmed, x));
    for (int it = 0; it < 8 && best > 0.0; ++it) {
      const std::complex<double> dg = eval_dpoly(trimmed, x);
      if (std::abs(dg) == 0.0) break;
      const std::complex<double> next = x - eval_poly(trimmed, x) / dg;
      const double r = std::abs(eval_poly(trimmed, next));
      if (r >= best) break;
      x = next;
      best = r;
    }
    root = x;
    est.max_residual = std::max(est.max_residual, best);
  }
  return est;
}

double theta_from_root(const std::complex<double>& root) {
  const double denom = 1.0 - root.real();
  if (std::abs(denom) < kPoleTolerance) return kRootSentinel;
  return 1.0 / denom;
}

int nearest_grid_index(const std::vector<double>& grid, double v) {
  if (grid.empty()) throw std::invalid_argument("nearest_grid_index: empty grid");
  int best = 0;
  double best_dist = std::abs(v - grid[0]);
  for (int i = 1; i < static_cast<int>(grid.size()); ++i) {
    const double dist = std::abs(v - grid[static_cast<std::size_t>(i)]);
    if (dist < best_dist) {  // strict: earlier (smaller) grid points win ties
      best = i;
      best_dist = dist;
    }
  }
  return best;
}

RootDecodeResult decode_root_from_empirical(const Distribution& p_hat, const DenseMatrix& kernel_inverse,
                                            const RootCodebook& codebook) {
  const int d = codebook.d;
  // Pseudo-distribution of the adder output: row vector p̂ · P⁻¹.  It sums to
  // one but may leave the simplex; it is used as-is, never re-normalized.
  std::vector<double> w_est(static_cast<std::size_t>(kernel_inverse.cols), 0.0);
  for (int c = 0; c < kernel_inverse.cols; ++c) {
    double s = 0.0;
    for (int r = 0; r < kernel_inverse.rows; ++r) {
      s += p_hat.w[static_cast<std::size_t>(r)] * kernel_inverse.at(r, c);
    }
    w_est[static_cast<std::size_t>(c)] = s;
  }

  RootDecodeResult result;
  result.pgf = poly_roots(w_est);

  std::vector<double> thetas;
  thetas.reserve(static_cast<std::size_t>(d));
  for (const auto& root : result.pgf.roots) thetas.push_back(theta_from_root(root));
  std::sort(thetas.begin(), thetas.end());
  // Missing roots (trimmed degree) become sentinels appended after the sort;
  // they round to the largest grid point, so decoding always terminates.
  while (static_cast<int>(thetas.size()) < d) thetas.push_back(kRootSentinel);
  if (static_cast<int>(thetas.size()) > d) thetas.resize(static_cast<std::size_t>(d));
  result.raw_thetas = thetas;

  result.thetas.resize(static_cast<std::size_t>(d));
  result.indices.resize(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const auto& grid = codebook.grid_values[static_cast<std::size_t>(i)];
    const int idx = nearest_grid_index(grid, thetas[static_cast<std::size_t>(i)]);
    result.indices[static_cast<std::size_t>(i)] = idx;
    result.thetas[static_cast<std::size_t>(i)] = grid[static_cast<std::size_t>(idx)];
  }
  return result;
}

RootDecodeResult decode_root(const Codeword& y, const ChannelSpec& spec,
                             const RootCodebook& codebook) {
  if (spec.p != 2) throw std::invalid_argument("decode_root: requires a binary per-sender alphabet");
  if (spec.d != codebook.d) throw std::invalid_argument("decode_root: sender count mismatch");
  const Distribution p_hat = empirical_distribution(y, spec.q);
  const DenseMatrix kernel_inverse = invert(spec.P);
  return decode_root_from_empirical(p_hat, kernel_inverse, codebook);
}

double root_stability_bound(const std::vector<double>& monic_coeffs, double delta,
                            double coeff_error) {
  if (!(delta > 0.0)) throw std::invalid_argument("root_stability_bound: delta must be positive");
  if (monic_coeffs.size() < 2 || monic_coeffs.back() != 1.0) {
    throw std::invalid_argument("root_stability_bound: expected a monic coefficient vector");
  }
  const int d = static_cast<int>(monic_coeffs.size()) - 1;
  double max_coeff = 0.0;
  for (int t = 0; t < d; ++t) max_coeff = std::max(max_coeff, monic_coeffs[static_cast<std::size_t>(t)]);
  const double lead = (2.0 * d - 1.0) * static_cast<double>(d) * static_cast<double>(d) /
                      std::pow(delta, d - 1);
  return lead * std::pow(2.0 + max_coeff, 2 * d) * coeff_error;
}

}  // namespace pamac
