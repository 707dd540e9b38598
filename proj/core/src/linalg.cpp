#include "pamac/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pamac {

namespace {

constexpr double kEps = 2.220446049250313e-16;

void check(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

/// LU decomposition with partial pivoting, in place.  Returns the pivot rows;
/// throws std::domain_error if a pivot is (numerically) zero.
std::vector<int> lu_decompose(DenseMatrix& m) {
  const int n = m.rows;
  std::vector<int> piv(static_cast<std::size_t>(n));
  double scale = 0.0;
  for (double v : m.data) scale = std::max(scale, std::abs(v));
  const double tiny = scale * kEps * n + 1e-300;
  for (int k = 0; k < n; ++k) {
    int best = k;
    for (int i = k + 1; i < n; ++i) {
      if (std::abs(m.at(i, k)) > std::abs(m.at(best, k))) best = i;
    }
    if (std::abs(m.at(best, k)) <= tiny) throw std::domain_error("lu: matrix is singular");
    piv[static_cast<std::size_t>(k)] = best;
    if (best != k) {
      for (int j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(best, j));
    }
    const double inv_pivot = 1.0 / m.at(k, k);
    for (int i = k + 1; i < n; ++i) {
      const double f = m.at(i, k) * inv_pivot;
      m.at(i, k) = f;
      for (int j = k + 1; j < n; ++j) m.at(i, j) -= f * m.at(k, j);
    }
  }
  return piv;
}

void lu_solve_inplace(const DenseMatrix& lu, const std::vector<int>& piv, std::vector<double>& b) {
  const int n = lu.rows;
  // The factorization swaps whole rows, multipliers included, so the stored L
  // is indexed by final row positions: permute b fully before eliminating.
  for (int k = 0; k < n; ++k) {
    std::swap(b[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(piv[static_cast<std::size_t>(k)])]);
  }
  for (int k = 0; k < n; ++k) {
    for (int i = k + 1; i < n; ++i) b[static_cast<std::size_t>(i)] -= lu.at(i, k) * b[static_cast<std::size_t>(k)];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j) s -= lu.at(i, j) * b[static_cast<std::size_t>(j)];
    b[static_cast<std::size_t>(i)] = s / lu.at(i, i);
  }
}

}  // namespace

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  check(a.cols == b.rows, "multiply: inner dimensions disagree");
  DenseMatrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      const double v = a.at(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) out.at(i, j) += v * b.at(k, j);
    }
  }
  return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix out(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < a.cols; ++j) out.at(j, i) = a.at(i, j);
  }
  return out;
}

std::vector<double> multiply(const DenseMatrix& a, const std::vector<double>& x) {
  check(static_cast<std::size_t>(a.cols) == x.size(), "multiply: vector length disagrees");
  std::vector<double> out(static_cast<std::size_t>(a.rows), 0.0);
  for (int i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < a.cols; ++j) s += a.at(i, j) * x[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

double inf_norm(const DenseMatrix& a) {
  double best = 0.0;
  for (int i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < a.cols; ++j) s += std::abs(a.at(i, j));
    best = std::max(best, s);
  }
  return best;
}

double one_norm(const DenseMatrix& a) {
  double best = 0.0;
  for (int j = 0; j < a.cols; ++j) {
    double s = 0.0;
    for (int i = 0; i < a.rows; ++i) s += std::abs(a.at(i, j));
    best = std::max(best, s);
  }
  return best;
}

double frobenius_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (double v : a.data) s += v * v;
  return std::sqrt(s);
}

DenseMatrix invert(const DenseMatrix& m) {
  check(m.rows == m.cols, "invert: matrix must be square");
  const int n = m.rows;
  DenseMatrix lu = m;
  const std::vector<int> piv = lu_decompose(lu);
  DenseMatrix inv(n, n);
  std::vector<double> col(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[static_cast<std::size_t>(j)] = 1.0;
    lu_solve_inplace(lu, piv, col);
    for (int i = 0; i < n; ++i) inv.at(i, j) = col[static_cast<std::size_t>(i)];
  }
  // One Newton step: X ← X(2I − MX).  Squares the residual of the LU-based
  // inverse, which keeps ill-conditioned (but admissible) inputs inside the
  // advertised residual envelope.
  DenseMatrix mx = multiply(m, inv);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) mx.at(i, j) = (i == j ? 2.0 : 0.0) - mx.at(i, j);
  }
  return multiply(inv, mx);
}

std::vector<double> solve_linear(const DenseMatrix& m, const std::vector<double>& b) {
  check(m.rows == m.cols, "solve_linear: matrix must be square");
  check(static_cast<std::size_t>(m.rows) == b.size(), "solve_linear: size mismatch");
  DenseMatrix lu = m;
  const std::vector<int> piv = lu_decompose(lu);
  std::vector<double> x = b;
  lu_solve_inplace(lu, piv, x);
  return x;
}

std::vector<double> least_squares_qr(const DenseMatrix& a, const std::vector<double>& b) {
  check(a.rows >= a.cols, "least_squares_qr: system must be overdetermined or square");
  check(static_cast<std::size_t>(a.rows) == b.size(), "least_squares_qr: size mismatch");
  const int m = a.rows, n = a.cols;
  DenseMatrix r = a;
  std::vector<double> rhs = b;
  // Householder triangularization, applying reflectors to rhs as we go.
  for (int k = 0; k < n; ++k) {
    double norm = 0.0;
    for (int i = k; i < m; ++i) norm += r.at(i, k) * r.at(i, k);
    norm = std::sqrt(norm);
    if (norm == 0.0) throw std::domain_error("least_squares_qr: rank-deficient column");
    // Give the pivot's sign to `norm` so the +1 below never cancels.
    if (r.at(k, k) < 0) norm = -norm;
    for (int i = k; i < m; ++i) r.at(i, k) /= norm;
    r.at(k, k) += 1.0;
    for (int j = k + 1; j < n; ++j) {
      double s = 0.0;
      for (int i = k; i < m; ++i) s += r.at(i, k) * r.at(i, j);
      s = -s / r.at(k, k);
      for (int i = k; i < m; ++i) r.at(i, j) += s * r.at(i, k);
    }
    double s = 0.0;
    for (int i = k; i < m; ++i) s += r.at(i, k) * rhs[static_cast<std::size_t>(i)];
    s = -s / r.at(k, k);
    for (int i = k; i < m; ++i) rhs[static_cast<std::size_t>(i)] += s * r.at(i, k);
    // The reflector maps the column onto −norm·e_k; store that diagonal of R
    // (the column below it holds the reflector itself, which back-substitution
    // never reads).
    r.at(k, k) = -norm;
  }
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    double s = rhs[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j) s -= r.at(i, j) * x[static_cast<std::size_t>(j)];
    x[static_cast<std::size_t>(i)] = s / r.at(i, i);
  }
  return x;
}

std::vector<double> least_squares_normal(const DenseMatrix& a, const std::vector<double>& b) {
  check(static_cast<std::size_t>(a.rows) == b.size(), "least_squares_normal: size mismatch");
  const DenseMatrix at = transpose(a);
  const DenseMatrix ata = multiply(at, a);
  const std::vector<double> atb = multiply(at, b);
  return solve_linear(ata, atb);
}

double min_singular_value(const DenseMatrix& a) {
  // One-sided Jacobi on the (transposed-if-wide) matrix: rotate column pairs
  // until all are mutually orthogonal; singular values are the column norms.
  DenseMatrix w = a.rows >= a.cols ? a : transpose(a);
  const int m = w.rows, n = w.cols;
  if (n == 0) return 0.0;
  auto col_dot = [&](int p, int q) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += w.at(i, p) * w.at(i, q);
    return s;
  };
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double app = col_dot(p, p);
        const double aqq = col_dot(q, q);
        const double apq = col_dot(p, q);
        if (std::abs(apq) <= 1e-30 + 1e-15 * std::sqrt(app * aqq)) continue;
        rotated = true;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int i = 0; i < m; ++i) {
          const double vp = w.at(i, p), vq = w.at(i, q);
          w.at(i, p) = c * vp - s * vq;
          w.at(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }
  double smin = -1.0;
  for (int j = 0; j < n; ++j) {
    const double s = std::sqrt(col_dot(j, j));
    if (smin < 0 || s < smin) smin = s;
  }
  return smin;
}

namespace {

/// Osborne balancing in powers of two (exact in floating point).
void balance(DenseMatrix& h) {
  const int n = h.rows;
  constexpr double radix = 2.0;
  constexpr double sq = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(h.at(j, i));
        r += std::abs(h.at(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sq;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sq;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        const double ginv = 1.0 / f;
        for (int j = 0; j < n; ++j) h.at(i, j) *= ginv;
        for (int j = 0; j < n; ++j) h.at(j, i) *= f;
      }
    }
  }
}

inline double sign_with(double magnitude, double sign_of) {
  return sign_of >= 0 ? std::abs(magnitude) : -std::abs(magnitude);
}

/// Double-shift QR iteration on an upper-Hessenberg matrix (real Schur
/// eigenvalues only, no vectors).  Returns false if some eigenvalue failed to
/// deflate within max_its iterations; in that case the untouched diagonal is
/// reported for the remaining block.
bool hessenberg_qr(DenseMatrix& h, std::vector<std::complex<double>>& out, int max_its,
                   int& total_its) {
  const int n = h.rows;
  out.assign(static_cast<std::size_t>(n), {0.0, 0.0});
  double anorm = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(h.at(i, j));
  }
  int nn = n - 1;
  double t = 0.0;
  bool ok = true;
  while (nn >= 0) {
    int its = 0;
    int l;
    do {
      for (l = nn; l >= 1; --l) {
        double s = std::abs(h.at(l - 1, l - 1)) + std::abs(h.at(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(h.at(l, l - 1)) <= kEps * s) {
          h.at(l, l - 1) = 0.0;
          break;
        }
      }
      if (l < 0) l = 0;
      double x = h.at(nn, nn);
      if (l == nn) {  // single eigenvalue deflated
        out[static_cast<std::size_t>(nn)] = {x + t, 0.0};
        nn -= 1;
        break;
      }
      double y = h.at(nn - 1, nn - 1);
      double w = h.at(nn, nn - 1) * h.at(nn - 1, nn);
      if (l == nn - 1) {  // 2x2 block deflated
        double p = 0.5 * (y - x);
        double q = p * p + w;
        double z = std::sqrt(std::abs(q));
        x += t;
        if (q >= 0.0) {
          z = p + sign_with(z, p);
          out[static_cast<std::size_t>(nn - 1)] = {x + z, 0.0};
          out[static_cast<std::size_t>(nn)] = {z != 0.0 ? x - w / z : x + z, 0.0};
        } else {
          out[static_cast<std::size_t>(nn - 1)] = {x + p, z};
          out[static_cast<std::size_t>(nn)] = {x + p, -z};
        }
        nn -= 2;
        break;
      }
      if (its >= max_its) {
        // Iteration cap: report the untouched block diagonal and flag.
        ok = false;
        for (int i = 0; i <= nn; ++i) out[static_cast<std::size_t>(i)] = {h.at(i, i) + t, 0.0};
        nn = -1;
        break;
      }
      if (its != 0 && its % 10 == 0) {  // exceptional shift
        t += x;
        for (int i = 0; i <= nn; ++i) h.at(i, i) -= x;
        const double s = std::abs(h.at(nn, nn - 1)) + std::abs(h.at(nn - 1, nn - 2));
        x = y = 0.75 * s;
        w = -0.4375 * s * s;
      }
      ++its;
      ++total_its;
      int m;
      double p = 0.0, q = 0.0, r = 0.0;
      for (m = nn - 2; m >= l; --m) {
        const double z = h.at(m, m);
        const double rr = x - z;
        const double ss = y - z;
        p = (rr * ss - w) / h.at(m + 1, m) + h.at(m, m + 1);
        q = h.at(m + 1, m + 1) - z - rr - ss;
        r = h.at(m + 2, m + 1);
        const double scale = std::abs(p) + std::abs(q) + std::abs(r);
        p /= scale;
        q /= scale;
        r /= scale;
        if (m == l) break;
        const double u = std::abs(h.at(m, m - 1)) * (std::abs(q) + std::abs(r));
        const double v =
            std::abs(p) * (std::abs(h.at(m - 1, m - 1)) + std::abs(z) + std::abs(h.at(m + 1, m + 1)));
        if (u <= kEps * v) break;
      }
      for (int i = m + 2; i <= nn; ++i) {
        h.at(i, i - 2) = 0.0;
        if (i != m + 2) h.at(i, i - 3) = 0.0;
      }
      for (int k = m; k <= nn - 1; ++k) {  // double QR sweep over rows l..nn
        if (k != m) {
          p = h.at(k, k - 1);
          q = h.at(k + 1, k - 1);
          r = k != nn - 1 ? h.at(k + 2, k - 1) : 0.0;
          x = std::abs(p) + std::abs(q) + std::abs(r);
          if (x != 0.0) {
            p /= x;
            q /= x;
            r /= x;
          }
        }
        const double s = sign_with(std::sqrt(p * p + q * q + r * r), p);
        if (s == 0.0) continue;
        if (k == m) {
          if (l != m) h.at(k, k - 1) = -h.at(k, k - 1);
        } else {
          h.at(k, k - 1) = -s * x;
        }
        p += s;
        x = p / s;
        y = q / s;
        double z = r / s;
        q /= p;
        r /= p;
        for (int j = k; j <= nn; ++j) {  // row modification
          double pp = h.at(k, j) + q * h.at(k + 1, j);
          if (k != nn - 1) pp += r * h.at(k + 2, j);
          h.at(k, j) -= pp * x;
          h.at(k + 1, j) -= pp * y;
          if (k != nn - 1) h.at(k + 2, j) -= pp * z;
        }
        const int mmin = nn < k + 3 ? nn : k + 3;
        for (int i = l; i <= mmin; ++i) {  // column modification
          double pp = x * h.at(i, k) + y * h.at(i, k + 1);
          if (k != nn - 1) pp += z * h.at(i, k + 2);
          h.at(i, k) -= pp;
          h.at(i, k + 1) -= pp * q;
          if (k != nn - 1) h.at(i, k + 2) -= pp * r;
        }
      }
    } while (l < nn - 1);
  }
  return ok;
}

}  // namespace

EigenResult companion_eigenvalues(const std::vector<double>& ascending_coeffs, int max_iterations) {
  check(ascending_coeffs.size() >= 2, "companion_eigenvalues: need degree >= 1");
  const int d = static_cast<int>(ascending_coeffs.size()) - 1;
  const double lead = ascending_coeffs[static_cast<std::size_t>(d)];
  check(lead != 0.0, "companion_eigenvalues: zero leading coefficient");
  EigenResult result;
  if (d == 1) {
    result.values = {{-ascending_coeffs[0] / lead, 0.0}};
    return result;
  }
  // Frobenius companion matrix in the last-column convention: ones on the
  // subdiagonal, −a_i (monic coefficients) in the last column.
  DenseMatrix h(d, d);
  for (int i = 1; i < d; ++i) h.at(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) h.at(i, d - 1) = -ascending_coeffs[static_cast<std::size_t>(i)] / lead;
  balance(h);
  result.converged = hessenberg_qr(h, result.values, max_iterations, result.iterations);
  return result;
}

}  // namespace pamac
