#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "finsler/matrix_fn.hpp"
#include "finsler/pointwise.hpp"

namespace finsler {

// Finitely many (Q_i, B_i) values. paired = true pairs the lists index by
// index; paired = false treats them as independent Q- and B-lists for the
// product certificate.
struct ModeSet {
  std::vector<SymMatrix> qs;
  std::vector<RectMatrix> bs;
  bool paired = true;

  void validate() const {
    if (qs.empty() || bs.empty()) throw InvalidInput("ModeSet: empty mode list");
    if (paired && qs.size() != bs.size())
      throw InvalidInput("ModeSet: paired mode lists must have equal length");
    const int n = qs[0].dim();
    for (const auto& q : qs)
      if (q.dim() != n) throw InvalidInput("ModeSet: inconsistent Q dimensions");
    const int m = bs[0].rows();
    for (const auto& b : bs)
      if (b.cols() != n || b.rows() != m) throw InvalidInput("ModeSet: inconsistent B dimensions");
  }
};

namespace detail {

// max of finite mode infima; +inf if any mode is infeasible, falling back
// to 0 when every mode is unconstrained.
inline ExtendedReal mode_sup(const std::vector<ExtendedReal>& vals) {
  bool any_finite = false;
  double best = 0.0;
  for (const auto& v : vals) {
    if (v.is_pos_inf()) return ExtendedReal::pos_inf();
    if (v.is_finite()) {
      best = any_finite ? std::max(best, v.value()) : v.value();
      any_finite = true;
    }
  }
  return ExtendedReal::finite(any_finite ? best : 0.0);
}

inline void verify_mode(const SymMatrix& q, const RectMatrix& b, double mu_bar,
                        const Tolerances& tols, const std::string& what) {
  if (!is_neg_def(shifted(q, mu_bar, gram(b)), tols.def_tol))
    throw InternalError("switching: " + what + " failed verification; margin too small");
}

}  // namespace detail

// One constant over all paired modes: max_i mu_inf(Q_i, B_i) + margin,
// verified against every mode; +inf if any mode is infeasible.
inline ExtendedReal certify_modes(const ModeSet& ms, double margin, const Tolerances& tols = {}) {
  ms.validate();
  if (!ms.paired) throw InvalidInput("certify_modes: mode set is not paired");
  if (!(margin > 0)) throw InvalidInput("certify_modes: margin must be positive");
  std::vector<ExtendedReal> infima;
  infima.reserve(ms.qs.size());
  for (std::size_t i = 0; i < ms.qs.size(); ++i) infima.push_back(mu_inf(ms.qs[i], ms.bs[i], tols));
  const ExtendedReal sup = detail::mode_sup(infima);
  if (sup.is_pos_inf()) return sup;
  const double mu_bar = sup.value() + margin;
  for (std::size_t i = 0; i < ms.qs.size(); ++i)
    detail::verify_mode(ms.qs[i], ms.bs[i], mu_bar, tols, "mode " + std::to_string(i + 1));
  return ExtendedReal::finite(mu_bar);
}

// One constant over all (Q_i, B_j) pairs: the sequence certificate, strictly
// stronger than the paired one.
inline ExtendedReal certify_product(const ModeSet& ms, double margin,
                                    const Tolerances& tols = {}) {
  ms.validate();
  if (!(margin > 0)) throw InvalidInput("certify_product: margin must be positive");
  std::vector<ExtendedReal> infima;
  infima.reserve(ms.qs.size() * ms.bs.size());
  for (const auto& q : ms.qs)
    for (const auto& b : ms.bs) infima.push_back(mu_inf(q, b, tols));
  const ExtendedReal sup = detail::mode_sup(infima);
  if (sup.is_pos_inf()) return sup;
  const double mu_bar = sup.value() + margin;
  for (std::size_t i = 0; i < ms.qs.size(); ++i)
    for (std::size_t j = 0; j < ms.bs.size(); ++j)
      detail::verify_mode(ms.qs[i], ms.bs[j], mu_bar, tols,
                          "pair (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
  return ExtendedReal::finite(mu_bar);
}

namespace detail {

inline std::string region_str(const MatrixFn::Region& r) {
  std::ostringstream os;
  for (std::size_t a = 0; a < r.box.size(); ++a)
    os << (a ? " x " : "") << "[" << r.box[a].first << ", " << r.box[a].second << ")";
  return os.str();
}

}  // namespace detail

// Piecewise-constant multiplier for piecewise-constant Q, B: regions are
// intersected into a common refinement and each cell gets its own
// mu_inf + margin (bare margin on unconstrained cells), verified per cell.
// Coverage of the domain is checked on the grid.
inline MatrixFn piecewise_mu(const MatrixFn& qf, const MatrixFn& bf, const ParamDomain& dom,
                             double margin, const Tolerances& tols = {}) {
  if (qf.kind() != MatrixFn::Kind::piecewise_const || bf.kind() != MatrixFn::Kind::piecewise_const)
    throw InvalidInput("piecewise_mu: Q and B must be piecewise constant");
  if (!qf.symmetric()) throw InvalidInput("piecewise_mu: Q must be declared symmetric");
  if (!(margin > 0)) throw InvalidInput("piecewise_mu: margin must be positive");

  std::vector<MatrixFn::Region> cells;
  std::vector<RectMatrix> values;
  int cell_id = 0;
  for (std::size_t i = 0; i < qf.regions().size(); ++i) {
    for (std::size_t j = 0; j < bf.regions().size(); ++j) {
      const auto& rq = qf.regions()[i];
      const auto& rb = bf.regions()[j];
      if (rq.box.size() != rb.box.size())
        throw InvalidInput("piecewise_mu: region dimension mismatch");
      MatrixFn::Region cell;
      bool empty = false;
      for (std::size_t a = 0; a < rq.box.size(); ++a) {
        const double lo = std::max(rq.box[a].first, rb.box[a].first);
        const double hi = std::min(rq.box[a].second, rb.box[a].second);
        if (!(lo < hi)) {
          empty = true;
          break;
        }
        cell.box.emplace_back(lo, hi);
      }
      if (empty) continue;
      ++cell_id;
      const SymMatrix q = SymMatrix::symmetrized(qf.region_values()[i]);
      const RectMatrix& b = bf.region_values()[j];
      const ExtendedReal mi = mu_inf(q, b, tols);
      if (mi.is_pos_inf())
        throw Infeasible("piecewise_mu: region " + std::to_string(cell_id) + " covering " +
                         detail::region_str(cell) + " is infeasible");
      const double mu = mi.is_neg_inf() ? margin : mi.value() + margin;
      detail::verify_mode(q, b, mu, tols, "region " + std::to_string(cell_id));
      cells.push_back(std::move(cell));
      values.push_back(RectMatrix::from_rows({{mu}}));
    }
  }
  const MatrixFn out = MatrixFn::piecewise(cells, values, true);
  for (const auto& s : dom.points()) out.eval(s);  // coverage check; throws UncoveredPoint
  return out;
}

}  // namespace finsler
