#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "finsler/domain.hpp"
#include "finsler/extended_real.hpp"
#include "finsler/matrix_fn.hpp"
#include "finsler/pointwise.hpp"
#include "finsler/util.hpp"

namespace finsler {

// mu_inf sampled over a domain. Carries its provenance (functions, domain,
// tolerances) so synthesized constants can be re-verified pointwise.
struct MuProfile {
  std::vector<std::vector<double>> points;
  std::vector<ExtendedReal> mu_inf_values;
  ExtendedReal sup_mu_inf;
  bool any_infeasible = false;
  std::optional<std::vector<double>> argmax_point;
  std::size_t argmax_index = 0;

  std::shared_ptr<const MatrixFn> qf, bf;
  ParamDomain dom = ParamDomain::finite({{0.0}});
  Tolerances tols;
};

namespace detail {

inline void check_fn_shapes(const MatrixFn& qf, const MatrixFn& bf, const ParamDomain& dom) {
  if (!qf.symmetric()) throw InvalidInput("analysis: Q must be declared symmetric");
  if (qf.rows() != qf.cols()) throw InvalidInput("analysis: Q must be square");
  if (bf.cols() != qf.cols()) throw InvalidInput("analysis: B columns must match dim(Q)");
  if (qf.domain_dim() != dom.dim() || bf.domain_dim() != dom.dim())
    throw InvalidInput("analysis: function domain dimension does not match the parameter set");
}

inline ExtendedReal sup_of(const std::vector<ExtendedReal>& vals, std::size_t* argmax) {
  bool any_inf = false, any_finite = false;
  double best = 0.0;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i].is_pos_inf()) {
      any_inf = true;
    } else if (vals[i].is_finite()) {
      if (!any_finite || vals[i].value() > best) {
        best = vals[i].value();
        best_i = i;
      }
      any_finite = true;
    }
  }
  if (argmax) *argmax = best_i;
  if (any_inf) return ExtendedReal::pos_inf();
  if (any_finite) return ExtendedReal::finite(best);
  return ExtendedReal::neg_inf();
}

}  // namespace detail

inline MuProfile profile(const MatrixFn& qf, const MatrixFn& bf, const ParamDomain& dom,
                         const Tolerances& tols = {}, int threads = 1) {
  detail::check_fn_shapes(qf, bf, dom);
  tols.validate();
  MuProfile p;
  p.points = dom.points();
  p.mu_inf_values.assign(p.points.size(), ExtendedReal());
  p.qf = std::make_shared<MatrixFn>(qf);
  p.bf = std::make_shared<MatrixFn>(bf);
  p.dom = dom;
  p.tols = tols;

  parallel_for(p.points.size(), threads, [&](std::size_t i) {
    const SymMatrix q = qf.eval_sym(p.points[i]);
    const RectMatrix b = bf.eval(p.points[i]);
    p.mu_inf_values[i] = mu_inf(q, b, tols);
  });

  p.sup_mu_inf = detail::sup_of(p.mu_inf_values, &p.argmax_index);
  p.any_infeasible = p.sup_mu_inf.is_pos_inf();
  if (p.sup_mu_inf.is_finite()) p.argmax_point = p.points[p.argmax_index];
  return p;
}

// Constant multiplier: sup of the profile plus a margin, re-verified at
// every grid point. +inf when any point is infeasible; an all-unconstrained
// profile yields the bare margin.
inline ExtendedReal synth_constant(const MuProfile& p, double margin) {
  if (!(margin > 0)) throw InvalidInput("synth_constant: margin must be positive");
  if (p.any_infeasible) return ExtendedReal::pos_inf();
  const double base = p.sup_mu_inf.is_finite() ? p.sup_mu_inf.value() : 0.0;
  const double mu_bar = base + margin;
  if (!p.qf || !p.bf) throw InvalidInput("synth_constant: profile lacks provenance");
  for (const auto& s : p.points) {
    const SymMatrix q = p.qf->eval_sym(s);
    const SymMatrix ngram = gram(p.bf->eval(s));
    if (!is_neg_def(shifted(q, mu_bar, ngram), p.tols.def_tol))
      throw InternalError("synth_constant: re-verification failed at " + detail::point_str(s));
  }
  return ExtendedReal::finite(mu_bar);
}

// Tabulated continuous multiplier mu~(s) = max(mu_inf(s) + eps, 0) on the
// grid, each value verified; multilinear interpolation between box grid
// points is advisory only.
class ContinuousMu {
 public:
  ContinuousMu(MuProfile profile, double eps, std::vector<double> values)
      : profile_(std::move(profile)), eps_(eps), values_(std::move(values)) {
    if (profile_.dom.kind() == ParamDomain::Kind::box_grid) {
      axes_pts_.resize(profile_.dom.axes().size());
      for (std::size_t a = 0; a < axes_pts_.size(); ++a)
        axes_pts_[a] = profile_.dom.axis_points(static_cast<int>(a));
    }
  }

  const MuProfile& profile() const { return profile_; }
  double eps() const { return eps_; }
  const std::vector<double>& grid_values() const { return values_; }

  // Exact at grid points; multilinear inside the hull of a box grid.
  double eval(const std::vector<double>& s) const {
    if (profile_.dom.kind() != ParamDomain::Kind::box_grid) {
      for (std::size_t i = 0; i < profile_.points.size(); ++i)
        if (profile_.points[i] == s) return values_[i];
      throw InvalidInput("ContinuousMu: interpolation is only defined on box grids");
    }
    const std::size_t d = axes_pts_.size();
    if (s.size() != d) throw InvalidInput("ContinuousMu: point dimension mismatch");
    std::vector<std::size_t> lo_idx(d);
    std::vector<double> frac(d);
    for (std::size_t a = 0; a < d; ++a) {
      const auto& pts = axes_pts_[a];
      if (s[a] < pts.front() - 1e-12 || s[a] > pts.back() + 1e-12)
        throw InvalidInput("ContinuousMu: point outside the grid hull");
      const auto it = std::upper_bound(pts.begin(), pts.end(), s[a]);
      std::size_t hi = std::min<std::size_t>(std::distance(pts.begin(), it), pts.size() - 1);
      if (hi == 0) hi = 1;
      lo_idx[a] = hi - 1;
      const double span = pts[hi] - pts[hi - 1];
      frac[a] = std::clamp((s[a] - pts[hi - 1]) / span, 0.0, 1.0);
    }
    // Blend the 2^d surrounding corners.
    double acc = 0.0;
    for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
      double w = 1.0;
      std::size_t flat = 0;
      for (std::size_t a = 0; a < d; ++a) {
        const bool up = (corner >> a) & 1u;
        w *= up ? frac[a] : 1.0 - frac[a];
        flat = flat * axes_pts_[a].size() + lo_idx[a] + (up ? 1 : 0);
      }
      acc += w * values_[flat];
    }
    return acc;
  }

  MatrixFn as_tabulated() const {
    std::vector<RectMatrix> vals;
    vals.reserve(values_.size());
    for (double v : values_) vals.push_back(RectMatrix::from_rows({{v}}));
    return MatrixFn::tabulated(profile_.points, vals, true);
  }

 private:
  MuProfile profile_;
  double eps_;
  std::vector<double> values_;
  std::vector<std::vector<double>> axes_pts_;
};

inline ContinuousMu synth_continuous(const MatrixFn& qf, const MatrixFn& bf,
                                     const ParamDomain& dom, double eps,
                                     const Tolerances& tols = {}, int threads = 1) {
  if (!(eps > 0)) throw InvalidInput("synth_continuous: eps must be positive");
  MuProfile p = profile(qf, bf, dom, tols, threads);
  for (std::size_t i = 0; i < p.points.size(); ++i)
    if (p.mu_inf_values[i].is_pos_inf())
      throw Infeasible("synth_continuous: infeasible at " + detail::point_str(p.points[i]));

  std::vector<double> values(p.points.size());
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    const ExtendedReal& mi = p.mu_inf_values[i];
    values[i] = mi.is_neg_inf() ? 0.0 : std::max(mi.value() + eps, 0.0);
    const SymMatrix q = qf.eval_sym(p.points[i]);
    const SymMatrix ngram = gram(bf.eval(p.points[i]));
    if (!is_neg_def(shifted(q, values[i], ngram), tols.def_tol))
      throw InternalError("synth_continuous: verification failed at " +
                          detail::point_str(p.points[i]));
  }
  return ContinuousMu(std::move(p), eps, std::move(values));
}

// Scalar eigenvalue envelopes for Q(s) and B^T(s)B(s).
struct BoundFns {
  MatrixFn ell_q = MatrixFn::constant(RectMatrix::from_rows({{0.0}}), 1, true);
  MatrixFn u_q = MatrixFn::constant(RectMatrix::from_rows({{0.0}}), 1, true);
  MatrixFn ell_r = MatrixFn::constant(RectMatrix::from_rows({{0.0}}), 1, true);
  MatrixFn u_r = MatrixFn::constant(RectMatrix::from_rows({{0.0}}), 1, true);
};

namespace detail {

inline double scalar_at(const MatrixFn& f, const std::vector<double>& s) {
  if (f.rows() != 1 || f.cols() != 1)
    throw InvalidInput("bounds: bound functions must be scalar (1x1)");
  return f.eval(s)(0, 0);
}

}  // namespace detail

// Checks the envelope property at every grid point (tolerance def_tol).
inline void validate_bounds(const BoundFns& bounds, const MatrixFn& qf, const MatrixFn& bf,
                            const ParamDomain& dom, const Tolerances& tols = {}) {
  detail::check_fn_shapes(qf, bf, dom);
  for (const auto& s : dom.points()) {
    const SymMatrix q = qf.eval_sym(s);
    const SymMatrix ngram = gram(bf.eval(s));
    const double lq = detail::scalar_at(bounds.ell_q, s), uq = detail::scalar_at(bounds.u_q, s);
    const double lr = detail::scalar_at(bounds.ell_r, s), ur = detail::scalar_at(bounds.u_r, s);
    const double tol_q = tols.def_tol * (1.0 + q.max_abs());
    const double tol_r = tols.def_tol * (1.0 + ngram.max_abs());
    const EigenSym eq = eig_sym(q);
    const EigenSym en = eig_sym(ngram);
    if (eq.values.front() < lq - tol_q || eq.values.back() > uq + tol_q ||
        en.values.front() < lr - tol_r || en.values.back() > ur + tol_r)
      throw InvalidInput("bounds: envelope violated at " + detail::point_str(s));
  }
}

// Grid supremum with a refinement trend. A grid supremum is always finite,
// so the useful signal is growth under refinement: the suspected_unbounded
// flag fires when one refinement level grows the sup by a factor >= 2.
struct SupDiagnostic {
  ExtendedReal sup;
  std::optional<std::vector<double>> argmax;
  bool any_infinite = false;
  double growth_ratio = 1.0;
  bool suspected_unbounded = false;
  bool verdict = false;  // finite and not suspected unbounded
};

namespace detail {

// Per-point closed-form infimum of {mu >= 0 | num - mu * den < 0}:
// 0 when num < 0, num/den when den > 0 (boundary of the open set), else +inf.
inline ExtendedReal scalar_inf(double num, double den) {
  if (num < 0.0) return ExtendedReal::finite(0.0);
  if (den > 0.0) return ExtendedReal::finite(num / den);
  return ExtendedReal::pos_inf();
}

template <typename PerPoint>
inline SupDiagnostic sup_diagnostic(const ParamDomain& dom, bool refinable, PerPoint per_point) {
  const auto level_sup = [&](const ParamDomain& d, SupDiagnostic* diag) {
    std::vector<ExtendedReal> vals;
    const auto pts = d.points();
    vals.reserve(pts.size());
    for (const auto& s : pts) vals.push_back(per_point(s));
    std::size_t argmax = 0;
    const ExtendedReal sup = sup_of(vals, &argmax);
    if (diag) {
      diag->sup = sup;
      if (sup.is_finite()) diag->argmax = pts[argmax];
      diag->any_infinite = diag->any_infinite || sup.is_pos_inf();
    }
    return sup;
  };

  SupDiagnostic diag;
  level_sup(dom, &diag);
  if (refinable) {
    SupDiagnostic fine1, fine2;
    const ExtendedReal s1 = level_sup(dom.refined(1), &fine1);
    const ExtendedReal s2 = level_sup(dom.refined(2), &fine2);
    diag.any_infinite = diag.any_infinite || fine1.any_infinite || fine2.any_infinite;
    if (s1.is_finite() && s2.is_finite()) {
      if (s1.value() > 0.0 && s2.value() > 0.0)
        diag.growth_ratio = s2.value() / s1.value();
      else if (s1.value() <= 0.0 && s2.value() > 0.0)
        diag.growth_ratio = std::numeric_limits<double>::infinity();
    }
    diag.suspected_unbounded = diag.growth_ratio >= 2.0 * (1.0 - 1e-9);
  }
  diag.verdict = !diag.any_infinite && !diag.suspected_unbounded;
  return diag;
}

inline bool refinable_fns(std::initializer_list<const MatrixFn*> fns) {
  for (const MatrixFn* f : fns)
    if (f->kind() == MatrixFn::Kind::tabulated) return false;
  return true;
}

}  // namespace detail

// Necessary test for a finite sup-inf: ell_Q(s) - mu * u_R(s) < 0.
inline SupDiagnostic bound_test_necessary_diag(const BoundFns& bounds, const ParamDomain& dom) {
  return detail::sup_diagnostic(
      dom, detail::refinable_fns({&bounds.ell_q, &bounds.u_r}), [&](const std::vector<double>& s) {
        return detail::scalar_inf(detail::scalar_at(bounds.ell_q, s),
                                  detail::scalar_at(bounds.u_r, s));
      });
}

inline bool bound_test_necessary(const BoundFns& bounds, const ParamDomain& dom) {
  return bound_test_necessary_diag(bounds, dom).verdict;
}

// Sufficient test: u_Q(s) - mu * ell_R(s) < 0.
inline SupDiagnostic bound_test_sufficient_diag(const BoundFns& bounds, const ParamDomain& dom) {
  return detail::sup_diagnostic(
      dom, detail::refinable_fns({&bounds.u_q, &bounds.ell_r}), [&](const std::vector<double>& s) {
        return detail::scalar_inf(detail::scalar_at(bounds.u_q, s),
                                  detail::scalar_at(bounds.ell_r, s));
      });
}

inline bool bound_test_sufficient(const BoundFns& bounds, const ParamDomain& dom) {
  return bound_test_sufficient_diag(bounds, dom).verdict;
}

// Scalar Q, B: Q < 0 where B vanishes, plus a finite (non-growing) sup of
// Q/B^2 elsewhere.
struct ScalarBoundReport {
  bool zero_set_ok = true;
  SupDiagnostic positive_set;
  bool verdict = false;
};

inline ScalarBoundReport bound_test_scalar_diag(const MatrixFn& qf, const MatrixFn& bf,
                                                const ParamDomain& dom,
                                                const Tolerances& tols = {}) {
  if (qf.rows() != 1 || qf.cols() != 1 || bf.rows() != 1 || bf.cols() != 1)
    throw InvalidInput("bound_test_scalar: Q and B must be scalar");
  ScalarBoundReport rep;
  for (const auto& s : dom.points()) {
    const double b = bf.eval(s)(0, 0);
    if (std::abs(b) <= tols.rank_tol && !(qf.eval(s)(0, 0) < 0.0)) rep.zero_set_ok = false;
  }
  rep.positive_set = detail::sup_diagnostic(
      dom, detail::refinable_fns({&qf, &bf}), [&](const std::vector<double>& s) {
        const double b = bf.eval(s)(0, 0);
        if (std::abs(b) <= tols.rank_tol) return ExtendedReal::finite(0.0);  // handled above
        return ExtendedReal::finite(qf.eval(s)(0, 0) / (b * b));
      });
  rep.verdict = rep.zero_set_ok && rep.positive_set.verdict;
  return rep;
}

inline bool bound_test_scalar(const MatrixFn& qf, const MatrixFn& bf, const ParamDomain& dom,
                              const Tolerances& tols = {}) {
  return bound_test_scalar_diag(qf, bf, dom, tols).verdict;
}

// Closed-form constant from envelopes: sup (u_Q + |u_Q|)/ell_R + 1,
// requiring ell_R > 0 on the whole grid. Verified pointwise when the
// actual Q, B are supplied.
inline double synth_from_bounds(const BoundFns& bounds, const ParamDomain& dom,
                                const MatrixFn* qf = nullptr, const MatrixFn* bf = nullptr,
                                const Tolerances& tols = {}) {
  double sup = -std::numeric_limits<double>::infinity();
  for (const auto& s : dom.points()) {
    const double lr = detail::scalar_at(bounds.ell_r, s);
    if (!(lr > 0.0))
      throw NotApplicable("synth_from_bounds: ell_R not positive at " + detail::point_str(s));
    const double uq = detail::scalar_at(bounds.u_q, s);
    sup = std::max(sup, (uq + std::abs(uq)) / lr);
  }
  const double mu_bar = sup + 1.0;
  if (qf && bf) {
    for (const auto& s : dom.points()) {
      const SymMatrix q = qf->eval_sym(s);
      const SymMatrix ngram = gram(bf->eval(s));
      if (!is_neg_def(shifted(q, mu_bar, ngram), tols.def_tol))
        throw InvalidInput("synth_from_bounds: envelopes do not bound Q, B at " +
                           detail::point_str(s));
    }
  }
  return mu_bar;
}

// Grid-scale verdicts for the functional statement chain. On a finite grid
// a pointwise-feasible problem admits continuous/polynomial/constant
// interpolants, so statements (a)-(d) coincide with pointwise feasibility;
// the constant statement additionally watches the refinement trend.
struct GridStatements {
  bool pointwise_feasible = false;  // statements (a)-(d) at grid scale
  SupDiagnostic constant;           // statement (e): sup mu_inf diagnostic
};

inline GridStatements grid_statements(const MatrixFn& qf, const MatrixFn& bf,
                                      const ParamDomain& dom, const Tolerances& tols = {},
                                      int threads = 1) {
  GridStatements st;
  const MuProfile base = profile(qf, bf, dom, tols, threads);
  st.pointwise_feasible = !base.any_infeasible;
  st.constant = detail::sup_diagnostic(
      dom, detail::refinable_fns({&qf, &bf}), [&](const std::vector<double>& s) {
        return mu_inf(qf.eval_sym(s), bf.eval(s), tols);
      });
  return st;
}

// Audit of the example2 family: evaluates the claimed multiplier
// rho(x) = e^{-x1} against the grid, classifies each point, and computes
// the corrected infimum profile rho_inf(x) = (1 + 3 x2^2)^2 e^{-x1}.
struct Example2Audit {
  struct Point {
    std::vector<double> x;
    double lambda_max_claimed = 0.0;
    std::string status;  // "strict", "boundary", or "violation"
    double rho_claimed = 0.0;
    double rho_inf = 0.0;
    double rho_closed_form = 0.0;
  };
  std::vector<Point> points;
  int violations = 0;
  int boundary_count = 0;
  double max_lambda = 0.0;
};

inline Example2Audit audit_example2(const ParamDomain& dom, const Tolerances& tols = {}) {
  if (dom.dim() != 2) throw InvalidInput("audit_example2: domain must be two-dimensional");
  const MatrixFn qf = MatrixFn::builtin(MatrixFn::Builtin::example2_Q);
  const MatrixFn bf = MatrixFn::builtin(MatrixFn::Builtin::example2_B);
  Example2Audit audit;
  bool first = true;
  for (const auto& x : dom.points()) {
    Example2Audit::Point pt;
    pt.x = x;
    const SymMatrix q = qf.eval_sym(x);
    const SymMatrix ngram = gram(bf.eval(x));
    pt.rho_claimed = std::exp(-x[0]);
    const SymMatrix m = shifted(q, pt.rho_claimed, ngram);
    pt.lambda_max_claimed = lambda_max(m);
    const double tol = tols.def_tol * (1.0 + m.max_abs());
    if (pt.lambda_max_claimed > tol) {
      pt.status = "violation";
      ++audit.violations;
    } else if (pt.lambda_max_claimed >= -tol) {
      pt.status = "boundary";
      ++audit.boundary_count;
    } else {
      pt.status = "strict";
    }
    const ExtendedReal mi = mu_inf(q, bf.eval(x), tols);
    pt.rho_inf = mi.value();
    const double c = 1.0 + 3.0 * x[1] * x[1];
    pt.rho_closed_form = c * c * std::exp(-x[0]);
    if (first || pt.lambda_max_claimed > audit.max_lambda) audit.max_lambda = pt.lambda_max_claimed;
    first = false;
    audit.points.push_back(std::move(pt));
  }
  return audit;
}

}  // namespace finsler
