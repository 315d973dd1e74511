#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/matrix.hpp"

namespace finsler {

// Eigendecomposition of a symmetric matrix: values ascending, vectors
// holds the matching orthonormal eigenvectors as columns.
struct EigenSym {
  std::vector<double> values;
  RectMatrix vectors;
};

namespace detail {

// Tangent of the Jacobi rotation angle from the standard two-sided /
// one-sided formulas, with overflow guard for extreme off-diagonal ratios.
inline double jacobi_tangent(double theta) {
  if (std::abs(theta) > 1e153) return 0.5 / theta;
  const double s = theta >= 0.0 ? 1.0 : -1.0;
  return s / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
}

}  // namespace detail

// Cyclic Jacobi for dense symmetric matrices. Converges when the
// off-diagonal Frobenius norm drops below 1e-12 * ||A||_F.
inline EigenSym eig_sym(const SymMatrix& a_in) {
  if (!a_in.all_finite()) throw InvalidInput("eig_sym: non-finite entries");
  const int n = a_in.dim();
  RectMatrix a = a_in.to_rect();
  RectMatrix v = RectMatrix::identity(n);
  const double norm = a_in.frobenius();

  if (n > 1 && norm > 0.0) {
    constexpr int kMaxSweeps = 64;
    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
      double off2 = 0.0;
      for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) off2 += a(p, q) * a(p, q);
      if (std::sqrt(2.0 * off2) <= 1e-12 * norm) break;

      for (int p = 0; p < n - 1; ++p) {
        for (int q = p + 1; q < n; ++q) {
          const double apq = a(p, q);
          if (apq == 0.0) continue;
          const double t = detail::jacobi_tangent((a(q, q) - a(p, p)) / (2.0 * apq));
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double s = t * c;
          const double app = a(p, p), aqq = a(q, q);
          a(p, p) = app - t * apq;
          a(q, q) = aqq + t * apq;
          a(p, q) = a(q, p) = 0.0;
          for (int r = 0; r < n; ++r) {
            if (r == p || r == q) continue;
            const double arp = a(r, p), arq = a(r, q);
            a(r, p) = a(p, r) = c * arp - s * arq;
            a(r, q) = a(q, r) = s * arp + c * arq;
          }
          for (int r = 0; r < n; ++r) {
            const double vrp = v(r, p), vrq = v(r, q);
            v(r, p) = c * vrp - s * vrq;
            v(r, q) = s * vrp + c * vrq;
          }
        }
      }
    }
    if (sweep == kMaxSweeps) throw InternalError("eig_sym: Jacobi did not converge");
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

  EigenSym e;
  e.values.resize(n);
  e.vectors = RectMatrix(n, n);
  for (int j = 0; j < n; ++j) {
    e.values[j] = a(order[j], order[j]);
    for (int i = 0; i < n; ++i) e.vectors(i, j) = v(i, order[j]);
  }
  return e;
}

inline double lambda_max(const SymMatrix& a) { return eig_sym(a).values.back(); }
inline double lambda_min(const SymMatrix& a) { return eig_sym(a).values.front(); }

// Singular values (descending) and right singular vectors of a real
// matrix, via one-sided Jacobi on the columns. Working directly on B keeps
// small singular values accurate to ~eps * sigma_max, which the relative
// rank decision sigma <= rank_tol * sigma_max depends on.
struct Svd {
  std::vector<double> sigma;  // descending
  RectMatrix v;               // n x n, columns are right singular vectors

  int rank(double rank_tol) const {
    if (sigma.empty() || sigma[0] == 0.0) return 0;
    int r = 0;
    for (double s : sigma)
      if (s > rank_tol * sigma[0]) ++r;
    return r;
  }
};

inline Svd svd_right(const RectMatrix& b) {
  if (b.rows() <= 0 || b.cols() <= 0) throw InvalidInput("svd_right: empty matrix");
  if (!b.all_finite()) throw InvalidInput("svd_right: non-finite entries");
  const int m = b.rows(), n = b.cols();
  RectMatrix w = b;
  RectMatrix v = RectMatrix::identity(n);

  const auto col_dot = [&](int p, int q) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += w(i, p) * w(i, q);
    return s;
  };

  if (n > 1 && b.max_abs() > 0.0) {
    // Columns whose norm collapses to rounding noise are flushed to exact
    // zero: their singular value is far below any rank threshold, V is
    // unaffected, and leaving denormal residue in them stalls convergence.
    const double floor2 = std::pow(1e-13 * b.frobenius(), 2);
    const auto flush_tiny = [&](int j, double njj) {
      if (njj != 0.0 && njj <= floor2)
        for (int i = 0; i < m; ++i) w(i, j) = 0.0;
    };
    constexpr int kMaxSweeps = 64;
    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
      bool rotated = false;
      for (int p = 0; p < n - 1; ++p) {
        for (int q = p + 1; q < n; ++q) {
          flush_tiny(p, col_dot(p, p));
          flush_tiny(q, col_dot(q, q));
          const double app = col_dot(p, p), aqq = col_dot(q, q), apq = col_dot(p, q);
          if (app == 0.0 || aqq == 0.0) continue;
          if (std::abs(apq) <= 1e-14 * std::sqrt(app * aqq) || apq == 0.0) continue;
          const double t = detail::jacobi_tangent((aqq - app) / (2.0 * apq));
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double s = t * c;
          for (int i = 0; i < m; ++i) {
            const double wip = w(i, p), wiq = w(i, q);
            w(i, p) = c * wip - s * wiq;
            w(i, q) = s * wip + c * wiq;
          }
          for (int i = 0; i < n; ++i) {
            const double vip = v(i, p), viq = v(i, q);
            v(i, p) = c * vip - s * viq;
            v(i, q) = s * vip + c * viq;
          }
          rotated = true;
        }
      }
      if (!rotated) break;
    }
    if (sweep == kMaxSweeps) throw InternalError("svd_right: Jacobi did not converge");
  }

  std::vector<double> sig(n);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += w(i, j) * w(i, j);
    sig[j] = std::sqrt(s);
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return sig[i] > sig[j]; });

  Svd out;
  out.sigma.resize(n);
  out.v = RectMatrix(n, n);
  for (int j = 0; j < n; ++j) {
    out.sigma[j] = sig[order[j]];
    for (int i = 0; i < n; ++i) out.v(i, j) = v(i, order[j]);
  }
  return out;
}

// Strict negative definiteness, decided relative to the matrix scale:
// true iff lambda_max(A) <= -tol * (1 + ||A||_max).
inline bool is_neg_def(const SymMatrix& a, double tol) {
  if (tol < 0) throw InvalidInput("is_neg_def: negative tolerance");
  return lambda_max(a) <= -tol * (1.0 + a.max_abs());
}

inline bool is_pos_def(const SymMatrix& a, double tol) { return is_neg_def(-a, tol); }

// Orthonormal basis of Ker(B) as an n x k matrix (n x 0 when B has full
// column rank). Rank decision: sigma_i <= rank_tol * sigma_max.
inline RectMatrix kernel_basis(const RectMatrix& b, double rank_tol) {
  if (rank_tol < 0) throw InvalidInput("kernel_basis: negative tolerance");
  const Svd sv = svd_right(b);
  const int n = b.cols();
  const int r = sv.rank(rank_tol);
  RectMatrix k(n, n - r);
  for (int j = r; j < n; ++j)
    for (int i = 0; i < n; ++i) k(i, j - r) = sv.v(i, j);
  return k;
}

// Principal square root of a PSD matrix. Eigenvalues within
// -1e-10 * (1 + ||A||_max) of zero are clamped to zero; anything more
// negative raises NotPsd.
inline SymMatrix principal_sqrt(const SymMatrix& a) {
  const EigenSym e = eig_sym(a);
  const double floor = -1e-10 * (1.0 + a.max_abs());
  const int n = a.dim();
  // R = V diag(lambda^(1/4)) (V diag(lambda^(1/4)))^T = V diag(sqrt(lambda)) V^T,
  // symmetric PSD by construction.
  RectMatrix scaled(n, n);
  for (int j = 0; j < n; ++j) {
    if (e.values[j] < floor) throw NotPsd("principal_sqrt: matrix significantly indefinite");
    const double s = std::pow(std::max(e.values[j], 0.0), 0.25);
    for (int i = 0; i < n; ++i) scaled(i, j) = e.vectors(i, j) * s;
  }
  return SymMatrix::symmetrized(scaled * scaled.transposed());
}

}  // namespace finsler
