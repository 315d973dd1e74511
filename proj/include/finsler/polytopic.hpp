#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "finsler/linalg.hpp"
#include "finsler/matrix.hpp"
#include "finsler/tolerances.hpp"

namespace finsler {

// Vertices A_i of a polytopic system matrix A(alpha) = sum alpha_i A_i.
struct Polytope {
  int n = 0;
  std::vector<RectMatrix> vertices;

  static Polytope from(std::vector<RectMatrix> verts) {
    if (verts.empty()) throw InvalidInput("Polytope: needs at least one vertex");
    Polytope p;
    p.n = verts[0].rows();
    for (const auto& a : verts) {
      if (a.rows() != p.n || a.cols() != p.n)
        throw InvalidInput("Polytope: vertices must be square with uniform size");
      if (!a.all_finite()) throw InvalidInput("Polytope: non-finite vertex");
    }
    p.vertices = std::move(verts);
    return p;
  }

  int vertex_count() const { return static_cast<int>(vertices.size()); }
};

namespace detail {

// Homogeneous exponent tuples of the given degree, lexicographic with the
// first coordinate descending (matches the simplex grid enumeration).
inline void monomials_rec(int pos, int vars, int remaining, std::vector<int>& cur,
                          std::vector<std::vector<int>>& out) {
  if (pos == vars - 1) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    cur[pos] = v;
    monomials_rec(pos + 1, vars, remaining - v, cur, out);
  }
}

inline std::vector<std::vector<int>> monomials(int vars, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(vars, 0);
  monomials_rec(0, vars, degree, cur, out);
  return out;
}

inline std::string monomial_suffix(const std::vector<int>& e) {
  std::string s;
  for (std::size_t i = 0; i < e.size(); ++i) s += (i ? "_" : "") + std::to_string(e[i]);
  return s;
}

// (sum h)! / prod h_i!, exact stepwise.
inline long long multinomial(const std::vector<int>& h) {
  long long r = 1;
  long long seen = 0;
  for (int v : h)
    for (int i = 1; i <= v; ++i) r = r * (++seen) / i;
  return r;
}

}  // namespace detail

// Symmetric matrix expression affine in the flattened scalar variables:
// c0 + sum_v x_v * coeff[v].
class LinForm {
 public:
  explicit LinForm(int dim) : dim_(dim), c0_(dim) {}

  int dim() const { return dim_; }
  const SymMatrix& constant_term() const { return c0_; }
  const std::map<int, SymMatrix>& coeffs() const { return coeffs_; }

  void add_const(const SymMatrix& m) { c0_ = c0_ + m; }

  void add_coeff(int var, const SymMatrix& m) {
    const auto it = coeffs_.find(var);
    if (it == coeffs_.end())
      coeffs_.emplace(var, m);
    else
      it->second = it->second + m;
  }

  SymMatrix eval(const std::vector<double>& x) const {
    SymMatrix acc = c0_;
    for (const auto& [var, coeff] : coeffs_) {
      if (var < 0 || var >= static_cast<int>(x.size()))
        throw InvalidInput("LinForm: assignment vector too short");
      acc = acc + x[var] * coeff;
    }
    return acc;
  }

 private:
  int dim_;
  SymMatrix c0_;
  std::map<int, SymMatrix> coeffs_;
};

enum class Sense { neg_def, pos_def };

struct Constraint {
  std::string name;
  Sense sense = Sense::neg_def;
  LinForm form;
};

// A finite set of LMIs in named matrix variables. Scalar variables are the
// flattening: every symmetric variable contributes its upper triangle
// row-major (n(n+1)/2 scalars), every general variable all entries
// row-major, in declaration order.
struct LmiSet {
  struct MatrixVar {
    std::string name;
    enum class Kind { symmetric, general } kind = Kind::symmetric;
    int rows = 0, cols = 0;
    int first_scalar = 0;
  };
  struct ScalarVar {
    int matrix_var = 0;
    int row = 0, col = 0;
  };

  std::vector<MatrixVar> variables;
  std::vector<ScalarVar> scalar_vars;
  std::vector<Constraint> constraints;

  int scalar_var_count() const { return static_cast<int>(scalar_vars.size()); }

  int add_variable(const std::string& name, MatrixVar::Kind kind, int rows, int cols) {
    MatrixVar v;
    v.name = name;
    v.kind = kind;
    v.rows = rows;
    v.cols = cols;
    v.first_scalar = scalar_var_count();
    const int index = static_cast<int>(variables.size());
    variables.push_back(v);
    if (kind == MatrixVar::Kind::symmetric) {
      for (int i = 0; i < rows; ++i)
        for (int j = i; j < cols; ++j) scalar_vars.push_back({index, i, j});
    } else {
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) scalar_vars.push_back({index, i, j});
    }
    return index;
  }

  // Flattens a by-name assignment of matrices into the scalar vector.
  // Symmetric variables read the symmetrized entries.
  std::vector<double> flatten(const std::map<std::string, RectMatrix>& assignment) const {
    std::vector<double> x(scalar_vars.size(), 0.0);
    for (std::size_t vi = 0; vi < variables.size(); ++vi) {
      const MatrixVar& v = variables[vi];
      const auto it = assignment.find(v.name);
      if (it == assignment.end())
        throw InvalidInput("LmiSet: assignment missing variable " + v.name);
      const RectMatrix& m = it->second;
      if (m.rows() != v.rows || m.cols() != v.cols)
        throw InvalidInput("LmiSet: assignment for " + v.name + " has wrong shape");
    }
    for (std::size_t k = 0; k < scalar_vars.size(); ++k) {
      const ScalarVar& sv = scalar_vars[k];
      const MatrixVar& v = variables[sv.matrix_var];
      const RectMatrix& m = assignment.at(v.name);
      x[k] = v.kind == MatrixVar::Kind::symmetric
                 ? 0.5 * (m(sv.row, sv.col) + m(sv.col, sv.row))
                 : m(sv.row, sv.col);
    }
    return x;
  }
};

namespace detail {

// Symmetric basis matrix for entry (i, j) of a symmetric variable.
inline SymMatrix sym_basis(int n, int i, int j) {
  SymMatrix s(n);
  s.set(i, j, 1.0);
  return s;
}

// E_ij for a general (rows x cols) variable.
inline RectMatrix gen_basis(int rows, int cols, int i, int j) {
  RectMatrix e(rows, cols);
  e(i, j) = 1.0;
  return e;
}

}  // namespace detail

// Vertex Lyapunov relaxation with linear P(alpha): P_i > 0 for each vertex
// and A_i^T P_j + P_j A_i < 0 for every ordered pair (i, j).
inline LmiSet gen_lyapunov_g1(const Polytope& p) {
  const int n = p.n, nv = p.vertex_count();
  LmiSet lmis;
  for (int i = 0; i < nv; ++i)
    lmis.add_variable("P_" + std::to_string(i + 1), LmiSet::MatrixVar::Kind::symmetric, n, n);

  for (int i = 0; i < nv; ++i) {
    Constraint c{"pos_P_" + std::to_string(i + 1), Sense::pos_def, LinForm(n)};
    const int base = lmis.variables[i].first_scalar;
    int k = base;
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) c.form.add_coeff(k++, detail::sym_basis(n, a, b));
    lmis.constraints.push_back(std::move(c));
  }

  for (int i = 0; i < nv; ++i) {
    const RectMatrix& ai = p.vertices[i];
    for (int j = 0; j < nv; ++j) {
      Constraint c{"lyap_" + std::to_string(i + 1) + "_" + std::to_string(j + 1), Sense::neg_def,
                   LinForm(n)};
      int k = lmis.variables[j].first_scalar;
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
          const RectMatrix s = detail::sym_basis(n, a, b).to_rect();
          c.form.add_coeff(k++, SymMatrix::symmetrized(ai.transposed() * s + s * ai));
        }
      lmis.constraints.push_back(std::move(c));
    }
  }
  return lmis;
}

// Same relaxation with the quadratic form collected per monomial of
// alpha: one constraint per alpha_i^2 and the full symmetric cross term
// per alpha_i alpha_j, i < j.
inline LmiSet gen_lyapunov_g1_collected(const Polytope& p) {
  const int n = p.n, nv = p.vertex_count();
  LmiSet lmis;
  for (int i = 0; i < nv; ++i)
    lmis.add_variable("P_" + std::to_string(i + 1), LmiSet::MatrixVar::Kind::symmetric, n, n);

  const auto lyap_coeff = [&](int vertex, int a, int b) {
    const RectMatrix s = detail::sym_basis(n, a, b).to_rect();
    return SymMatrix::symmetrized(p.vertices[vertex].transposed() * s + s * p.vertices[vertex]);
  };

  for (int i = 0; i < nv; ++i) {
    Constraint c{"pos_P_" + std::to_string(i + 1), Sense::pos_def, LinForm(n)};
    int k = lmis.variables[i].first_scalar;
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) c.form.add_coeff(k++, detail::sym_basis(n, a, b));
    lmis.constraints.push_back(std::move(c));
  }
  for (int i = 0; i < nv; ++i) {
    Constraint c{"mono_" + std::to_string(i + 1) + "_" + std::to_string(i + 1), Sense::neg_def,
                 LinForm(n)};
    int k = lmis.variables[i].first_scalar;
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) c.form.add_coeff(k++, lyap_coeff(i, a, b));
    lmis.constraints.push_back(std::move(c));
  }
  for (int i = 0; i < nv; ++i) {
    for (int j = i + 1; j < nv; ++j) {
      Constraint c{"mono_" + std::to_string(i + 1) + "_" + std::to_string(j + 1), Sense::neg_def,
                   LinForm(n)};
      int kj = lmis.variables[j].first_scalar;
      int ki = lmis.variables[i].first_scalar;
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
          c.form.add_coeff(kj++, lyap_coeff(i, a, b));  // A_i^T P_j + P_j A_i
          c.form.add_coeff(ki++, lyap_coeff(j, a, b));  // A_j^T P_i + P_i A_j
        }
      lmis.constraints.push_back(std::move(c));
    }
  }
  return lmis;
}

// Slack-form relaxation: P(alpha) and X(alpha) homogeneous of degrees g_p
// and g_x on the simplex, with the 2n x 2n expression
//   [[0, P], [P, 0]] + X(alpha) [A(alpha) -I] + [A(alpha) -I]^T X(alpha)^T
// collected per monomial of degree max(g_p, g_x + 1); P-positivity is
// imposed at the vertices.
inline LmiSet gen_finsler_form(const Polytope& p, int g_p, int g_x) {
  if (g_p < 1) throw InvalidInput("gen_finsler_form: g_p must be >= 1");
  if (g_x < 0 || g_x > g_p) throw InvalidInput("gen_finsler_form: need 0 <= g_x <= g_p");
  const int n = p.n, nv = p.vertex_count();

  const auto p_monos = detail::monomials(nv, g_p);
  const auto x_monos = detail::monomials(nv, g_x);
  const int target_deg = std::max(g_p, g_x + 1);
  const auto targets = detail::monomials(nv, target_deg);
  std::map<std::vector<int>, int> target_index;
  for (std::size_t t = 0; t < targets.size(); ++t) target_index[targets[t]] = static_cast<int>(t);

  LmiSet lmis;
  std::vector<int> p_var(p_monos.size()), x_var(x_monos.size());
  for (std::size_t m = 0; m < p_monos.size(); ++m)
    p_var[m] = lmis.add_variable("P_" + detail::monomial_suffix(p_monos[m]),
                                 LmiSet::MatrixVar::Kind::symmetric, n, n);
  for (std::size_t m = 0; m < x_monos.size(); ++m)
    x_var[m] = lmis.add_variable("X_" + detail::monomial_suffix(x_monos[m]),
                                 LmiSet::MatrixVar::Kind::general, 2 * n, n);

  // G_i = [A_i  -I], n x 2n; on the simplex [A(alpha) -I] = sum alpha_i G_i.
  std::vector<RectMatrix> g(nv, RectMatrix(n, 2 * n));
  for (int i = 0; i < nv; ++i) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) g[i](a, b) = p.vertices[i](a, b);
      g[i](a, n + a) = -1.0;
    }
  }

  // P(e_i) > 0 at each vertex: the pure-power monomial coefficient.
  for (int i = 0; i < nv; ++i) {
    std::vector<int> pure(nv, 0);
    pure[i] = g_p;
    const auto it = std::find(p_monos.begin(), p_monos.end(), pure);
    const int var = p_var[std::distance(p_monos.begin(), it)];
    Constraint c{"pos_P_vertex_" + std::to_string(i + 1), Sense::pos_def, LinForm(n)};
    int k = lmis.variables[var].first_scalar;
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) c.form.add_coeff(k++, detail::sym_basis(n, a, b));
    lmis.constraints.push_back(std::move(c));
  }

  std::vector<Constraint> monomial_constraints;
  monomial_constraints.reserve(targets.size());
  for (const auto& t : targets)
    monomial_constraints.push_back(
        Constraint{"mono_" + detail::monomial_suffix(t), Sense::neg_def, LinForm(2 * n)});

  // P block contributions, homogenized by (sum alpha)^(target_deg - g_p).
  const auto pad_monos = detail::monomials(nv, target_deg - g_p);
  for (std::size_t m = 0; m < p_monos.size(); ++m) {
    for (const auto& h : pad_monos) {
      std::vector<int> t(nv);
      for (int i = 0; i < nv; ++i) t[i] = p_monos[m][i] + h[i];
      const double w = static_cast<double>(detail::multinomial(h));
      Constraint& c = monomial_constraints[target_index.at(t)];
      int k = lmis.variables[p_var[m]].first_scalar;
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
          SymMatrix blk(2 * n);  // [[0, S], [S, 0]]
          blk.set(a, n + b, blk(a, n + b) + w);
          if (a != b) blk.set(b, n + a, blk(b, n + a) + w);
          c.form.add_coeff(k++, blk);
        }
    }
  }

  // X(alpha) [A(alpha) -I] + transpose, one vertex factor at a time,
  // homogenized by (sum alpha)^(target_deg - g_x - 1).
  const auto x_pad = detail::monomials(nv, target_deg - g_x - 1);
  for (std::size_t m = 0; m < x_monos.size(); ++m) {
    for (int i = 0; i < nv; ++i) {
      for (const auto& h : x_pad) {
        std::vector<int> t(nv);
        for (int v = 0; v < nv; ++v) t[v] = x_monos[m][v] + (v == i ? 1 : 0) + h[v];
        const double w = static_cast<double>(detail::multinomial(h));
        Constraint& c = monomial_constraints[target_index.at(t)];
        int k = lmis.variables[x_var[m]].first_scalar;
        for (int a = 0; a < 2 * n; ++a)
          for (int b = 0; b < n; ++b) {
            const RectMatrix prod = detail::gen_basis(2 * n, n, a, b) * g[i];
            c.form.add_coeff(k++, w * SymMatrix::symmetrized(prod + prod.transposed()));
          }
      }
    }
  }

  for (auto& c : monomial_constraints) lmis.constraints.push_back(std::move(c));
  return lmis;
}

namespace detail {

inline long long checked_mul(long long a, long long b) {
  long long r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("count: integer overflow");
  return r;
}

// C(a, b) by incremental exact steps.
inline long long binom(int a, int b) {
  if (b < 0 || b > a) return 0;
  long long r = 1;
  for (int i = 1; i <= b; ++i) r = checked_mul(r, a - b + i) / i;
  return r;
}

}  // namespace detail

// Scalar variable count of the full-degree slack relaxation:
// n(5n+1)(N+g-1)! / (2 g! (N-1)!).
inline long long count_full(int n, int nv, int g) {
  if (n < 1 || nv < 1 || g < 0) throw InvalidInput("count_full: need n, N >= 1 and g >= 0");
  const long long monos = detail::binom(nv + g - 1, g);
  return detail::checked_mul(detail::checked_mul(n, 5LL * n + 1) / 2, monos);
}

// Scalar variable count with X restricted to linear dependence:
// n(n+1)(N+g-1)! / (2 g! (N-1)!) + 2 n^2 N.
inline long long count_reduced(int n, int nv, int g) {
  if (n < 1 || nv < 1 || g < 0) throw InvalidInput("count_reduced: need n, N >= 1 and g >= 0");
  const long long monos = detail::binom(nv + g - 1, g);
  const long long p_part = detail::checked_mul(detail::checked_mul(n, n + 1LL) / 2, monos);
  return p_part + detail::checked_mul(2LL * n * n, nv);
}

// Per-constraint evaluation of a candidate assignment. margin is the
// positive slack to the boundary: -lambda_max for < 0 constraints,
// lambda_min for > 0 constraints; satisfied uses the usual relative test.
struct ConstraintReport {
  std::string name;
  Sense sense = Sense::neg_def;
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  double margin = 0.0;
  bool satisfied = false;
};

struct VerifyReport {
  std::vector<ConstraintReport> constraints;
  bool all_satisfied = true;
};

inline VerifyReport verify_candidate_flat(const LmiSet& lmis, const std::vector<double>& x,
                                          const Tolerances& tols = {}) {
  if (static_cast<int>(x.size()) != lmis.scalar_var_count())
    throw InvalidInput("verify_candidate: assignment has wrong length");
  VerifyReport rep;
  for (const auto& c : lmis.constraints) {
    const SymMatrix m = c.form.eval(x);
    const EigenSym e = eig_sym(m);
    ConstraintReport r;
    r.name = c.name;
    r.sense = c.sense;
    r.lambda_max = e.values.back();
    r.lambda_min = e.values.front();
    r.margin = c.sense == Sense::neg_def ? -r.lambda_max : r.lambda_min;
    r.satisfied = r.margin >= tols.def_tol * (1.0 + m.max_abs());
    rep.all_satisfied = rep.all_satisfied && r.satisfied;
    rep.constraints.push_back(std::move(r));
  }
  return rep;
}

inline VerifyReport verify_candidate(const LmiSet& lmis,
                                     const std::map<std::string, RectMatrix>& assignment,
                                     const Tolerances& tols = {}) {
  return verify_candidate_flat(lmis, lmis.flatten(assignment), tols);
}

// The 2n x 2n slack-form stability block at one simplex point:
//   [[-mu A^T A, mu A^T + P], [mu A + P, -mu I]] < 0,
// cross-checked against the classical A^T P + P A < 0.
struct StabilityCheck {
  bool finsler_block = false;
  bool lyapunov = false;
};

inline StabilityCheck stability_finsler_pointwise(const Polytope& p,
                                                  const std::vector<double>& alpha,
                                                  const SymMatrix& lyap_p, double mu,
                                                  const Tolerances& tols = {}) {
  if (static_cast<int>(alpha.size()) != p.vertex_count())
    throw InvalidInput("stability_finsler_pointwise: alpha size must match vertex count");
  double sum = 0.0;
  for (double a : alpha) {
    if (a < -1e-12) throw InvalidInput("stability_finsler_pointwise: alpha must be nonnegative");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw InvalidInput("stability_finsler_pointwise: alpha must sum to 1");
  if (lyap_p.dim() != p.n) throw InvalidInput("stability_finsler_pointwise: P has wrong size");

  const int n = p.n;
  RectMatrix a(n, n);
  for (int i = 0; i < p.vertex_count(); ++i) a = a + alpha[i] * p.vertices[i];

  const RectMatrix ata = a.transposed() * a;
  RectMatrix block(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      block(i, j) = -mu * ata(i, j);
      block(i, n + j) = mu * a(j, i) + lyap_p(i, j);
      block(n + i, j) = mu * a(i, j) + lyap_p(i, j);
      block(n + i, n + j) = i == j ? -mu : 0.0;
    }

  StabilityCheck check;
  check.finsler_block = is_neg_def(SymMatrix::symmetrized(block), tols.def_tol);
  check.lyapunov = is_neg_def(
      SymMatrix::symmetrized(a.transposed() * lyap_p.to_rect() + lyap_p.to_rect() * a),
      tols.def_tol);
  return check;
}

}  // namespace finsler
