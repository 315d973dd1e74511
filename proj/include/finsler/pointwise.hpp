#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "finsler/extended_real.hpp"
#include "finsler/linalg.hpp"
#include "finsler/matrix.hpp"
#include "finsler/tolerances.hpp"

namespace finsler {

// Verdicts and witnesses for one (Q, B) instance. The four statement
// verdicts agree by construction (the quadratic-form statement is decided
// through the kernel-restricted form); mu_witness is finite with margin
// over mu_inf when feasible, +inf when no multiplier exists, -inf when
// every multiplier works (B = 0 with Q < 0).
struct FinslerCertificate {
  bool verdict_f1 = false;
  bool verdict_f4 = false;
  ExtendedReal mu_witness;
  std::optional<RectMatrix> x_witness;
  ExtendedReal mu_inf;
  Tolerances tolerances;
};

namespace detail {

inline void check_pair_dims(const SymMatrix& q, const RectMatrix& b) {
  if (b.cols() != q.dim() || b.rows() <= 0)
    throw InvalidInput("finsler: B must be m x n with n = dim(Q)");
  if (!b.all_finite() || !q.all_finite()) throw InvalidInput("finsler: non-finite entries");
}

inline bool b_is_zero(const RectMatrix& b, const Tolerances& tols) {
  return b.max_abs() <= tols.rank_tol;
}

// Kernel-restricted negativity given a precomputed SVD of B. Full column
// rank leaves nothing to check and counts as satisfied.
inline bool f4_from_svd(const SymMatrix& q, const Svd& sv, const Tolerances& tols) {
  const int n = q.dim();
  const int r = sv.rank(tols.rank_tol);
  if (r == n) return true;
  RectMatrix k(n, n - r);
  for (int j = r; j < n; ++j)
    for (int i = 0; i < n; ++i) k(i, j - r) = sv.v(i, j);
  return is_neg_def(congruence(q, k), tols.def_tol);
}

// lambda_max(N^{-1/2} Q N^{-1/2}) with N = B^T B > 0; this is exactly the
// infimum of feasible multipliers when B has full column rank.
inline double mu_inf_fast_from_svd(const SymMatrix& q, const Svd& sv) {
  const int n = q.dim();
  RectMatrix scaled(n, n);  // V diag(1/sigma)
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) scaled(i, j) = sv.v(i, j) / sv.sigma[j];
  const SymMatrix m = SymMatrix::symmetrized(scaled.transposed() * q.to_rect() * scaled);
  return lambda_max(m);
}

// Bisection on mu -> lambda_max(Q - mu N), convex and nonincreasing.
// Feasibility (a negative tail exists) must have been established.
inline double mu_inf_bisect_impl(const SymMatrix& q, const RectMatrix& b, const Svd& sv,
                                 const Tolerances& tols) {
  const int n = q.dim();
  const SymMatrix ngram = gram(b);
  const auto g = [&](double mu) { return lambda_max(shifted(q, mu, ngram)); };

  const int r = sv.rank(tols.rank_tol);
  const double lam_min_n = (r == n) ? sv.sigma[n - 1] * sv.sigma[n - 1] : 0.0;

  // The start is only a heuristic (it is pushed down until it brackets);
  // the scale floor keeps it finite when rank_tol is set to zero.
  const double denom =
      std::max({lam_min_n, tols.rank_tol, 1e-12 * sv.sigma[0] * sv.sigma[0]});
  double lo = -(1.0 + q.max_abs()) / denom;
  for (int i = 0; g(lo) < 0.0; ++i) {
    if (i > 200) throw InternalError("mu_inf: no lower bracket");
    lo *= 2.0;
  }

  const double lam_plus = sv.sigma[r - 1] * sv.sigma[r - 1];  // smallest retained eigenvalue of N
  const double lam_q = lambda_max(q);
  double hi = 1.0 + (lam_q + std::abs(lam_q)) / lam_plus;
  for (int i = 0; g(hi) >= 0.0; ++i) {
    if (i > 200) throw InternalError("mu_inf: no upper bracket");
    hi *= 2.0;
  }

  for (int i = 0; i < 500; ++i) {
    if (hi - lo <= tols.bisect_abs + tols.bisect_rel * std::max(std::abs(lo), std::abs(hi))) break;
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Statement (F4): (B^perp)^T Q B^perp < 0, trivially satisfied when B has
// full column rank.
inline bool check_f4(const SymMatrix& q, const RectMatrix& b, const Tolerances& tols = {}) {
  detail::check_pair_dims(q, b);
  tols.validate();
  // A numerically zero B has kernel R^n; decide on Q directly so the
  // verdict agrees with mu_inf's zero-B branch.
  if (detail::b_is_zero(b, tols)) return is_neg_def(q, tols.def_tol);
  return detail::f4_from_svd(q, svd_right(b), tols);
}

// Infimum of the open interval M = {mu | Q - mu B^T B < 0}: +inf when M is
// empty, -inf when B = 0 and Q < 0, otherwise the finite boundary.
inline ExtendedReal mu_inf(const SymMatrix& q, const RectMatrix& b, const Tolerances& tols = {}) {
  detail::check_pair_dims(q, b);
  tols.validate();
  if (detail::b_is_zero(b, tols))
    return is_neg_def(q, tols.def_tol) ? ExtendedReal::neg_inf() : ExtendedReal::pos_inf();
  const Svd sv = svd_right(b);
  if (!detail::f4_from_svd(q, sv, tols)) return ExtendedReal::pos_inf();
  if (sv.rank(tols.rank_tol) == q.dim())
    return ExtendedReal::finite(detail::mu_inf_fast_from_svd(q, sv));
  return ExtendedReal::finite(detail::mu_inf_bisect_impl(q, b, sv, tols));
}

// Fast path only; requires full column rank.
inline double mu_inf_full_rank(const SymMatrix& q, const RectMatrix& b,
                               const Tolerances& tols = {}) {
  detail::check_pair_dims(q, b);
  tols.validate();
  const Svd sv = svd_right(b);
  if (sv.rank(tols.rank_tol) != q.dim())
    throw RankDeficient("mu_inf_full_rank: B is not full column rank");
  return detail::mu_inf_fast_from_svd(q, sv);
}

// General path forced, for cross-checking against the fast path.
inline ExtendedReal mu_inf_bisect(const SymMatrix& q, const RectMatrix& b,
                                  const Tolerances& tols = {}) {
  detail::check_pair_dims(q, b);
  tols.validate();
  if (detail::b_is_zero(b, tols))
    return is_neg_def(q, tols.def_tol) ? ExtendedReal::neg_inf() : ExtendedReal::pos_inf();
  const Svd sv = svd_right(b);
  if (!detail::f4_from_svd(q, sv, tols)) return ExtendedReal::pos_inf();
  return ExtendedReal::finite(detail::mu_inf_bisect_impl(q, b, sv, tols));
}

// Closed-form multiplier mu = 1 + (lambda_max(Q) + |lambda_max(Q)|) /
// lambda_min(B^T B), valid whenever B has full column rank.
inline double construct_mu(const SymMatrix& q, const RectMatrix& b, const Tolerances& tols = {}) {
  detail::check_pair_dims(q, b);
  tols.validate();
  const Svd sv = svd_right(b);
  const int n = q.dim();
  const double lam_min_n = sv.sigma[n - 1] * sv.sigma[n - 1];
  const double lam_max_n = sv.sigma[0] * sv.sigma[0];
  if (b.rows() < n || lam_min_n <= tols.rank_tol * lam_max_n || lam_min_n <= 0.0)
    throw RankDeficient("construct_mu: B is not full column rank");
  const double lam_q = lambda_max(q);
  return 1.0 + (lam_q + std::abs(lam_q)) / lam_min_n;
}

namespace detail {

// Witness margin over mu_inf; doubled until the shifted matrix passes the
// relative definiteness test (ill-conditioned instances need more room).
inline double choose_witness_mu(const SymMatrix& q, const RectMatrix& b, double mu_inf_value,
                                const Tolerances& tols) {
  const SymMatrix ngram = gram(b);
  double margin = std::max(1e-6, 1e-6 * std::abs(mu_inf_value));
  for (int i = 0; i < 60; ++i) {
    const double mu = mu_inf_value + margin;
    if (is_neg_def(shifted(q, mu, ngram), tols.def_tol)) return mu;
    margin *= 2.0;
  }
  throw InternalError("finsler: witness margin exhausted; tolerances misconfigured");
}

}  // namespace detail

// Matrix witness X with Q + X B + B^T X^T < 0, as X = -1/2 mu B^T. With no
// mu supplied, a full-column-rank B uses the closed-form mu; otherwise mu
// comes from mu_inf plus a margin. Throws Infeasible when M is empty.
inline RectMatrix construct_x(const SymMatrix& q, const RectMatrix& b, const Tolerances& tols = {},
                              std::optional<double> mu = std::nullopt) {
  detail::check_pair_dims(q, b);
  tols.validate();
  double mu_value;
  if (mu.has_value()) {
    mu_value = *mu;
  } else {
    try {
      mu_value = construct_mu(q, b, tols);  // closed form when full column rank
    } catch (const RankDeficient&) {
      const ExtendedReal mi = mu_inf(q, b, tols);
      if (mi.is_pos_inf()) throw Infeasible("construct_x: no multiplier exists");
      mu_value = mi.is_neg_inf() ? 0.0 : detail::choose_witness_mu(q, b, mi.value(), tols);
    }
  }
  return -0.5 * mu_value * b.transposed();
}

// Full certificate: statement verdicts, mu over the infimum, the induced X,
// and the tolerances used. Cross-checks that all four statement verdicts
// agree before returning.
inline FinslerCertificate certify(const SymMatrix& q, const RectMatrix& b,
                                  const Tolerances& tols = {}) {
  detail::check_pair_dims(q, b);
  tols.validate();
  FinslerCertificate cert;
  cert.tolerances = tols;

  const Svd sv = svd_right(b);
  const bool zero_b = detail::b_is_zero(b, tols);
  const bool f4 = zero_b ? is_neg_def(q, tols.def_tol) : detail::f4_from_svd(q, sv, tols);
  cert.verdict_f1 = cert.verdict_f4 = f4;

  if (!f4) {
    cert.mu_witness = ExtendedReal::pos_inf();
    cert.mu_inf = ExtendedReal::pos_inf();
    return cert;
  }
  if (zero_b) {
    cert.mu_inf = ExtendedReal::neg_inf();
    cert.mu_witness = ExtendedReal::neg_inf();
    cert.x_witness = RectMatrix(q.dim(), b.rows());
    return cert;
  }

  cert.mu_inf = (sv.rank(tols.rank_tol) == q.dim())
                    ? ExtendedReal::finite(detail::mu_inf_fast_from_svd(q, sv))
                    : ExtendedReal::finite(detail::mu_inf_bisect_impl(q, b, sv, tols));
  const double mu = detail::choose_witness_mu(q, b, cert.mu_inf.value(), tols);
  cert.mu_witness = ExtendedReal::finite(mu);
  const RectMatrix x = -0.5 * mu * b.transposed();
  cert.x_witness = x;

  const SymMatrix ngram = gram(b);
  const bool f2 = is_neg_def(shifted(q, mu, ngram), tols.def_tol);
  const bool f3 = is_neg_def(
      SymMatrix::symmetrized(q.to_rect() + x * b + (x * b).transposed()), tols.def_tol);
  if (!(f2 && f3))
    throw InternalError("certify: statement verdicts disagree; tolerances misconfigured");
  return cert;
}

}  // namespace finsler
