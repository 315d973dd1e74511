#pragma once

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/matrix.hpp"

namespace finsler {

namespace detail {

inline std::string point_str(const std::vector<double>& s) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? ", " : "") << s[i];
  os << ")";
  return os.str();
}

inline double int_pow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace detail

// Parameter-dependent matrix-valued function: multivariate polynomial,
// value table over grid points, piecewise constant over axis-aligned boxes,
// or one of the built-in closed-form demo families.
class MatrixFn {
 public:
  enum class Kind { poly, tabulated, piecewise_const, builtin };

  struct PolyTerm {
    std::vector<int> exponents;
    RectMatrix coeff;
  };

  // Axis-aligned box region; membership is half-open [lo, hi) with a
  // closed second pass so outer boundaries stay covered.
  struct Region {
    std::vector<std::pair<double, double>> box;

    bool contains_half_open(const std::vector<double>& s) const {
      for (std::size_t a = 0; a < box.size(); ++a)
        if (!(s[a] >= box[a].first && s[a] < box[a].second)) return false;
      return true;
    }
    bool contains_closed(const std::vector<double>& s) const {
      for (std::size_t a = 0; a < box.size(); ++a)
        if (!(s[a] >= box[a].first && s[a] <= box[a].second)) return false;
      return true;
    }
  };

  enum class Builtin { example1_Q, example1_B, example2_Q, example2_B };

  // q(s) choice for the example1_Q family: q = s, q = e^s, or the
  // discontinuous jump variant q(s) = 1/(s - sbar) for s > sbar, qbar else.
  struct QChoice {
    enum class Kind { linear, exponential, jump } kind = Kind::linear;
    double sbar = 1.0;
    double qbar = 1.0;
  };

  static MatrixFn poly(int domain_dim, int rows, int cols, std::vector<PolyTerm> terms,
                       bool symmetric) {
    if (domain_dim < 1 || rows < 1 || cols < 1) throw InvalidInput("MatrixFn: bad dimensions");
    if (symmetric && rows != cols) throw InvalidInput("MatrixFn: symmetric requires square");
    for (const auto& t : terms) {
      if (static_cast<int>(t.exponents.size()) != domain_dim)
        throw InvalidInput("MatrixFn: exponent tuple length mismatch");
      for (int e : t.exponents)
        if (e < 0) throw InvalidInput("MatrixFn: negative exponent");
      if (t.coeff.rows() != rows || t.coeff.cols() != cols)
        throw InvalidInput("MatrixFn: coefficient shape mismatch");
      if (!t.coeff.all_finite()) throw InvalidInput("MatrixFn: non-finite coefficient");
    }
    MatrixFn f;
    f.kind_ = Kind::poly;
    f.dim_ = domain_dim;
    f.rows_ = rows;
    f.cols_ = cols;
    f.symmetric_ = symmetric;
    f.terms_ = std::move(terms);
    return f;
  }

  static MatrixFn constant(const RectMatrix& value, int domain_dim, bool symmetric) {
    PolyTerm t;
    t.exponents.assign(domain_dim, 0);
    t.coeff = value;
    return poly(domain_dim, value.rows(), value.cols(), {std::move(t)}, symmetric);
  }

  static MatrixFn tabulated(std::vector<std::vector<double>> points,
                            std::vector<RectMatrix> values, bool symmetric) {
    if (points.empty() || points.size() != values.size())
      throw InvalidInput("MatrixFn: tabulated needs matching nonempty points/values");
    MatrixFn f;
    f.kind_ = Kind::tabulated;
    f.dim_ = static_cast<int>(points[0].size());
    f.rows_ = values[0].rows();
    f.cols_ = values[0].cols();
    f.symmetric_ = symmetric;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (static_cast<int>(points[i].size()) != f.dim_)
        throw InvalidInput("MatrixFn: tabulated point dimension mismatch");
      if (values[i].rows() != f.rows_ || values[i].cols() != f.cols_)
        throw InvalidInput("MatrixFn: tabulated value shape mismatch");
      if (!values[i].all_finite()) throw InvalidInput("MatrixFn: non-finite tabulated value");
      f.tab_index_[points[i]] = i;
    }
    f.tab_points_ = std::move(points);
    f.tab_values_ = std::move(values);
    return f;
  }

  static MatrixFn piecewise(std::vector<Region> regions, std::vector<RectMatrix> values,
                            bool symmetric) {
    if (regions.empty() || regions.size() != values.size())
      throw InvalidInput("MatrixFn: piecewise needs matching nonempty regions/values");
    MatrixFn f;
    f.kind_ = Kind::piecewise_const;
    f.dim_ = static_cast<int>(regions[0].box.size());
    f.rows_ = values[0].rows();
    f.cols_ = values[0].cols();
    f.symmetric_ = symmetric;
    for (std::size_t i = 0; i < regions.size(); ++i) {
      if (static_cast<int>(regions[i].box.size()) != f.dim_)
        throw InvalidInput("MatrixFn: region dimension mismatch");
      for (const auto& [lo, hi] : regions[i].box)
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
          throw InvalidInput("MatrixFn: region axis must have lo < hi");
      if (values[i].rows() != f.rows_ || values[i].cols() != f.cols_)
        throw InvalidInput("MatrixFn: piecewise value shape mismatch");
      if (!values[i].all_finite()) throw InvalidInput("MatrixFn: non-finite piecewise value");
    }
    f.regions_ = std::move(regions);
    f.region_values_ = std::move(values);
    return f;
  }

  static MatrixFn builtin(Builtin which) { return builtin(which, QChoice()); }

  static MatrixFn builtin(Builtin which, QChoice q) {
    MatrixFn f;
    f.kind_ = Kind::builtin;
    f.builtin_ = which;
    f.qchoice_ = q;
    switch (which) {
      case Builtin::example1_Q:
        f.dim_ = 1, f.rows_ = 2, f.cols_ = 2, f.symmetric_ = true;
        break;
      case Builtin::example1_B:
        f.dim_ = 1, f.rows_ = 1, f.cols_ = 2, f.symmetric_ = false;
        break;
      case Builtin::example2_Q:
        f.dim_ = 2, f.rows_ = 2, f.cols_ = 2, f.symmetric_ = true;
        break;
      case Builtin::example2_B:
        f.dim_ = 2, f.rows_ = 1, f.cols_ = 2, f.symmetric_ = false;
        break;
    }
    return f;
  }

  Kind kind() const { return kind_; }
  int domain_dim() const { return dim_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool symmetric() const { return symmetric_; }
  const std::vector<Region>& regions() const { return regions_; }
  const std::vector<RectMatrix>& region_values() const { return region_values_; }
  const std::vector<std::vector<double>>& tabulated_points() const { return tab_points_; }

  RectMatrix eval(const std::vector<double>& s) const {
    if (static_cast<int>(s.size()) != dim_)
      throw InvalidInput("MatrixFn: point dimension mismatch at " + detail::point_str(s));
    switch (kind_) {
      case Kind::poly: {
        RectMatrix acc(rows_, cols_);
        for (const auto& t : terms_) {
          double mono = 1.0;
          for (int a = 0; a < dim_; ++a) mono *= detail::int_pow(s[a], t.exponents[a]);
          acc = acc + mono * t.coeff;
        }
        return acc;
      }
      case Kind::tabulated: {
        const auto it = tab_index_.find(s);
        if (it == tab_index_.end())
          throw UncoveredPoint("MatrixFn: no tabulated value at " + detail::point_str(s));
        return tab_values_[it->second];
      }
      case Kind::piecewise_const: {
        for (std::size_t i = 0; i < regions_.size(); ++i)
          if (regions_[i].contains_half_open(s)) return region_values_[i];
        for (std::size_t i = 0; i < regions_.size(); ++i)
          if (regions_[i].contains_closed(s)) return region_values_[i];
        throw UncoveredPoint("MatrixFn: point " + detail::point_str(s) +
                             " not covered by any region");
      }
      case Kind::builtin:
        return eval_builtin(s);
    }
    throw InternalError("MatrixFn: bad kind");
  }

  SymMatrix eval_sym(const std::vector<double>& s) const {
    if (!symmetric_)
      throw InvalidInput("MatrixFn: eval_sym on a function not declared symmetric");
    return SymMatrix::symmetrized(eval(s));
  }

 private:
  RectMatrix eval_builtin(const std::vector<double>& s) const {
    switch (builtin_) {
      case Builtin::example1_Q: {
        double q;
        switch (qchoice_.kind) {
          case QChoice::Kind::linear:
            q = s[0];
            break;
          case QChoice::Kind::exponential:
            q = std::exp(s[0]);
            break;
          case QChoice::Kind::jump:
            q = s[0] > qchoice_.sbar ? 1.0 / (s[0] - qchoice_.sbar) : qchoice_.qbar;
            break;
          default:
            throw InternalError("MatrixFn: bad q choice");
        }
        if (!std::isfinite(q))
          throw InvalidInput("MatrixFn: q(s) not finite at " + detail::point_str(s));
        return SymMatrix::diag({-1.0, q}).to_rect();
      }
      case Builtin::example1_B:
        return RectMatrix::from_rows({{0.0, s[0]}});
      case Builtin::example2_Q: {
        const double c = 1.0 + 3.0 * s[1] * s[1];
        return RectMatrix::from_rows({{-std::exp(s[0]), c}, {c, 0.0}});
      }
      case Builtin::example2_B:
        return RectMatrix::from_rows({{0.0, 1.0}});
    }
    throw InternalError("MatrixFn: bad builtin");
  }

  Kind kind_ = Kind::poly;
  int dim_ = 1, rows_ = 1, cols_ = 1;
  bool symmetric_ = false;
  std::vector<PolyTerm> terms_;
  std::vector<std::vector<double>> tab_points_;
  std::vector<RectMatrix> tab_values_;
  std::map<std::vector<double>, std::size_t> tab_index_;
  std::vector<Region> regions_;
  std::vector<RectMatrix> region_values_;
  Builtin builtin_ = Builtin::example1_Q;
  QChoice qchoice_;
};

}  // namespace finsler
