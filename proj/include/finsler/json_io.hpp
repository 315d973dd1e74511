#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/analysis.hpp"
#include "finsler/json_writer.hpp"
#include "finsler/pointwise.hpp"
#include "finsler/polytopic.hpp"
#include "finsler/switching.hpp"

namespace finsler {

using Json = nlohmann::json;

namespace io {

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON in ") + path + ": " + e.what());
  }
  return j;
}

inline std::vector<std::vector<double>> matrix_rows(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty())
    throw InvalidInput(what + ": expected a nonempty array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw InvalidInput(what + ": rows must be arrays");
    std::vector<double> row;
    for (const auto& v : r) {
      if (!v.is_number()) throw InvalidInput(what + ": entries must be numbers");
      row.push_back(v.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline RectMatrix rect_from_json(const Json& j, const std::string& what) {
  return RectMatrix::from_rows(matrix_rows(j, what));
}

inline SymMatrix sym_from_json(const Json& j, const std::string& what) {
  return SymMatrix::from_rows(matrix_rows(j, what));
}

inline ParamDomain domain_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw InvalidInput("domain: expected an object with a kind");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "box_grid") {
    std::vector<BoxAxis> axes;
    for (const auto& a : j.at("axes")) {
      BoxAxis axis;
      axis.lo = a.at("lo").get<double>();
      axis.hi = a.at("hi").get<double>();
      axis.count = a.at("count").get<int>();
      axis.open_lo = a.value("open_lo", false);
      axis.open_hi = a.value("open_hi", false);
      axes.push_back(axis);
    }
    return ParamDomain::box(std::move(axes));
  }
  if (kind == "simplex_grid")
    return ParamDomain::simplex(j.at("N").get<int>(), j.at("D").get<int>());
  if (kind == "finite_set") {
    std::vector<std::vector<double>> pts;
    for (const auto& p : j.at("points")) pts.push_back(p.get<std::vector<double>>());
    return ParamDomain::finite(std::move(pts));
  }
  throw InvalidInput("domain: unknown kind " + kind);
}

inline MatrixFn::QChoice qchoice_from_json(const Json& j) {
  MatrixFn::QChoice q;
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "linear" || s == "s")
      q.kind = MatrixFn::QChoice::Kind::linear;
    else if (s == "exp" || s == "exponential")
      q.kind = MatrixFn::QChoice::Kind::exponential;
    else
      throw InvalidInput("builtin q: unknown choice " + s);
    return q;
  }
  if (j.is_object() && j.value("kind", "") == "jump") {
    q.kind = MatrixFn::QChoice::Kind::jump;
    q.sbar = j.at("sbar").get<double>();
    q.qbar = j.at("qbar").get<double>();
    return q;
  }
  throw InvalidInput("builtin q: expected \"linear\", \"exp\", or a jump object");
}

// A matrix function: a bare array is a constant matrix; otherwise an object
// selected by kind. domain_dim resolves constants; default_symmetric
// applies where the schema leaves it implicit.
inline MatrixFn fn_from_json(const Json& j, int domain_dim, bool default_symmetric,
                             const std::string& what) {
  if (j.is_array())
    return MatrixFn::constant(rect_from_json(j, what), domain_dim, default_symmetric);
  if (!j.is_object() || !j.contains("kind"))
    throw InvalidInput(what + ": expected a matrix or an object with a kind");
  const std::string kind = j.at("kind").get<std::string>();
  const bool symmetric = j.value("symmetric", default_symmetric);
  if (kind == "const")
    return MatrixFn::constant(rect_from_json(j.at("value"), what), domain_dim, symmetric);
  if (kind == "poly") {
    const int dim = j.value("dim", domain_dim);
    std::vector<MatrixFn::PolyTerm> terms;
    for (const auto& t : j.at("terms")) {
      MatrixFn::PolyTerm term;
      term.exponents = t.at("exponents").get<std::vector<int>>();
      term.coeff = rect_from_json(t.at("coeff"), what + " coefficient");
      terms.push_back(std::move(term));
    }
    if (terms.empty()) throw InvalidInput(what + ": poly needs at least one term");
    const int rows = j.value("rows", terms[0].coeff.rows());
    const int cols = j.value("cols", terms[0].coeff.cols());
    return MatrixFn::poly(dim, rows, cols, std::move(terms), symmetric);
  }
  if (kind == "tabulated") {
    std::vector<std::vector<double>> pts;
    std::vector<RectMatrix> vals;
    for (const auto& p : j.at("points")) pts.push_back(p.get<std::vector<double>>());
    for (const auto& v : j.at("values")) vals.push_back(rect_from_json(v, what + " value"));
    return MatrixFn::tabulated(std::move(pts), std::move(vals), symmetric);
  }
  if (kind == "piecewise_const") {
    std::vector<MatrixFn::Region> regions;
    std::vector<RectMatrix> vals;
    for (const auto& r : j.at("regions")) {
      MatrixFn::Region region;
      for (const auto& ax : r.at("box")) {
        if (!ax.is_array() || ax.size() != 2)
          throw InvalidInput(what + ": region box axes are [lo, hi] pairs");
        region.box.emplace_back(ax[0].get<double>(), ax[1].get<double>());
      }
      regions.push_back(std::move(region));
      vals.push_back(rect_from_json(r.at("value"), what + " region value"));
    }
    return MatrixFn::piecewise(std::move(regions), std::move(vals), symmetric);
  }
  if (kind == "builtin") {
    const std::string name = j.at("name").get<std::string>();
    const MatrixFn::QChoice q =
        j.contains("q") ? qchoice_from_json(j.at("q")) : MatrixFn::QChoice();
    if (name == "example1_Q") return MatrixFn::builtin(MatrixFn::Builtin::example1_Q, q);
    if (name == "example1_B") return MatrixFn::builtin(MatrixFn::Builtin::example1_B);
    if (name == "example2_Q") return MatrixFn::builtin(MatrixFn::Builtin::example2_Q);
    if (name == "example2_B") return MatrixFn::builtin(MatrixFn::Builtin::example2_B);
    throw InvalidInput(what + ": unknown builtin " + name);
  }
  throw InvalidInput(what + ": unknown function kind " + kind);
}

inline Tolerances tolerances_from_json(const Json& j) {
  Tolerances t;
  if (j.is_null()) return t;
  if (!j.is_object()) throw InvalidInput("tolerances: expected an object");
  t.def_tol = j.value("def_tol", t.def_tol);
  t.rank_tol = j.value("rank_tol", t.rank_tol);
  if (j.contains("bisect_tol")) {
    t.bisect_abs = j.at("bisect_tol").get<double>();
    t.bisect_rel = t.bisect_abs;
  }
  t.bisect_abs = j.value("bisect_abs", t.bisect_abs);
  t.bisect_rel = j.value("bisect_rel", t.bisect_rel);
  t.validate();
  return t;
}

// A problem is either a single (Q, B) pair of plain matrices or a pair of
// matrix functions over a domain; plain matrices with a domain act as
// constants.
struct Problem {
  std::optional<ParamDomain> dom;
  std::optional<MatrixFn> qf, bf;
  std::optional<SymMatrix> q;
  std::optional<RectMatrix> b;
  Tolerances tols;

  bool has_domain() const { return dom.has_value(); }
};

inline Problem problem_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("problem: expected an object");
  if (!j.contains("Q") || !j.contains("B")) throw InvalidInput("problem: needs Q and B");
  Problem p;
  p.tols = tolerances_from_json(j.value("tolerances", Json()));
  if (j.contains("domain")) {
    p.dom = domain_from_json(j.at("domain"));
    p.qf = fn_from_json(j.at("Q"), p.dom->dim(), /*default_symmetric=*/true, "Q");
    p.bf = fn_from_json(j.at("B"), p.dom->dim(), /*default_symmetric=*/false, "B");
  } else {
    if (!j.at("Q").is_array() || !j.at("B").is_array())
      throw InvalidInput("problem: function-valued Q, B need a domain");
    p.q = sym_from_json(j.at("Q"), "Q");
    p.b = rect_from_json(j.at("B"), "B");
  }
  return p;
}

inline ModeSet modes_from_json(const Json& j) {
  ModeSet ms;
  if (j.contains("modes")) {
    for (const auto& m : j.at("modes")) {
      ms.qs.push_back(sym_from_json(m.at("Q"), "mode Q"));
      ms.bs.push_back(rect_from_json(m.at("B"), "mode B"));
    }
    ms.paired = true;
  } else if (j.contains("Qs") && j.contains("Bs")) {
    for (const auto& q : j.at("Qs")) ms.qs.push_back(sym_from_json(q, "Qs entry"));
    for (const auto& b : j.at("Bs")) ms.bs.push_back(rect_from_json(b, "Bs entry"));
    ms.paired = false;
  } else {
    throw InvalidInput("modes: expected \"modes\" or \"Qs\"/\"Bs\" lists");
  }
  ms.validate();
  return ms;
}

inline Polytope polytope_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("vertices"))
    throw InvalidInput("polytope: expected an object with vertices");
  std::vector<RectMatrix> verts;
  for (const auto& v : j.at("vertices")) verts.push_back(rect_from_json(v, "vertex"));
  return Polytope::from(std::move(verts));
}

struct BoundsProblem {
  ParamDomain dom = ParamDomain::finite({{0.0}});
  BoundFns bounds;
  std::optional<MatrixFn> qf, bf;
  Tolerances tols;
};

inline BoundsProblem bounds_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("domain"))
    throw InvalidInput("bounds: expected an object with a domain");
  BoundsProblem bp;
  bp.dom = domain_from_json(j.at("domain"));
  bp.tols = tolerances_from_json(j.value("tolerances", Json()));
  const int d = bp.dom.dim();
  if (j.contains("ell_Q")) bp.bounds.ell_q = fn_from_json(j.at("ell_Q"), d, true, "ell_Q");
  if (j.contains("u_Q")) bp.bounds.u_q = fn_from_json(j.at("u_Q"), d, true, "u_Q");
  if (j.contains("ell_R")) bp.bounds.ell_r = fn_from_json(j.at("ell_R"), d, true, "ell_R");
  if (j.contains("u_R")) bp.bounds.u_r = fn_from_json(j.at("u_R"), d, true, "u_R");
  if (j.contains("Q")) bp.qf = fn_from_json(j.at("Q"), d, true, "Q");
  if (j.contains("B")) bp.bf = fn_from_json(j.at("B"), d, false, "B");
  return bp;
}

inline std::map<std::string, RectMatrix> assignment_from_json(const Json& j) {
  const Json& obj = j.contains("assignment") ? j.at("assignment") : j;
  if (!obj.is_object()) throw InvalidInput("assignment: expected an object of matrices");
  std::map<std::string, RectMatrix> out;
  for (const auto& [name, value] : obj.items())
    out.emplace(name, rect_from_json(value, "assignment " + name));
  return out;
}

// ---- report writers ----

inline void write_tolerances(JsonWriter& w, const Tolerances& t) {
  w.key("tolerances").begin_object();
  w.key("def_tol").value(t.def_tol);
  w.key("rank_tol").value(t.rank_tol);
  w.key("bisect_abs").value(t.bisect_abs);
  w.key("bisect_rel").value(t.bisect_rel);
  w.end_object();
}

inline void write_matrix(JsonWriter& w, const RectMatrix& m) {
  w.begin_array();
  for (int i = 0; i < m.rows(); ++i) {
    w.begin_array();
    for (int j = 0; j < m.cols(); ++j) w.value(m(i, j));
    w.end_array();
  }
  w.end_array();
}

inline std::string certificate_json(const FinslerCertificate& cert) {
  JsonWriter w;
  w.begin_object();
  const bool feasible = cert.verdict_f4;
  w.key("feasible").value(feasible);
  w.key("statements").begin_object();
  w.key("F1").value(cert.verdict_f1);
  w.key("F2").value(feasible);
  w.key("F3").value(feasible);
  w.key("F4").value(cert.verdict_f4);
  w.end_object();
  w.key("mu_inf").value(cert.mu_inf);
  w.key("mu_witness").value(cert.mu_witness);
  w.key("x_witness");
  if (cert.x_witness.has_value())
    write_matrix(w, *cert.x_witness);
  else
    w.value("none");
  write_tolerances(w, cert.tolerances);
  w.end_object();
  return w.str();
}

// Per-point witness verification used by the profile interfaces.
inline std::vector<bool> verified_flags(const MuProfile& p) {
  std::vector<bool> flags(p.points.size(), false);
  if (!p.qf || !p.bf) return flags;
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    const ExtendedReal& mi = p.mu_inf_values[i];
    if (mi.is_pos_inf()) continue;
    const SymMatrix q = p.qf->eval_sym(p.points[i]);
    const RectMatrix b = p.bf->eval(p.points[i]);
    if (mi.is_neg_inf()) {
      flags[i] = is_neg_def(q, p.tols.def_tol);
      continue;
    }
    try {
      detail::choose_witness_mu(q, b, mi.value(), p.tols);
      flags[i] = true;
    } catch (const InternalError&) {
      flags[i] = false;
    }
  }
  return flags;
}

// CSV columns: s1..sd, mu_inf (with +inf/-inf literals), verified.
inline std::string profile_csv(const MuProfile& p) {
  const std::vector<bool> flags = verified_flags(p);
  std::string out;
  const int d = p.points.empty() ? 0 : static_cast<int>(p.points[0].size());
  for (int a = 1; a <= d; ++a) out += "s" + std::to_string(a) + ",";
  out += "mu_inf,verified\n";
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    for (double v : p.points[i]) out += fmt_e(v) + ",";
    out += p.mu_inf_values[i].str();
    out += flags[i] ? ",1\n" : ",0\n";
  }
  return out;
}

inline void write_sup_diagnostic(JsonWriter& w, const SupDiagnostic& d) {
  w.begin_object();
  w.key("sup").value(d.sup);
  w.key("argmax");
  if (d.argmax.has_value())
    w.point(*d.argmax);
  else
    w.value("none");
  w.key("any_infinite").value(d.any_infinite);
  w.key("growth_ratio").value(d.growth_ratio);
  w.key("suspected_unbounded").value(d.suspected_unbounded);
  w.key("verdict").value(d.verdict);
  w.end_object();
}

inline std::string profile_json(const MuProfile& p, const GridStatements* statements) {
  const std::vector<bool> flags = verified_flags(p);
  JsonWriter w;
  w.begin_object();
  w.key("points").begin_array();
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    w.begin_object();
    w.key("s").point(p.points[i]);
    w.key("mu_inf").value(p.mu_inf_values[i]);
    w.key("verified").value(static_cast<bool>(flags[i]));
    w.end_object();
  }
  w.end_array();
  w.key("sup_mu_inf").value(p.sup_mu_inf);
  w.key("any_infeasible").value(p.any_infeasible);
  w.key("argmax");
  if (p.argmax_point.has_value())
    w.point(*p.argmax_point);
  else
    w.value("none");
  if (statements) {
    w.key("statements").begin_object();
    w.key("F2a").value(statements->pointwise_feasible);
    w.key("F2b").value(statements->pointwise_feasible);
    w.key("F2c").value(statements->pointwise_feasible);
    w.key("F2d").value(statements->pointwise_feasible);
    w.key("F2e");
    write_sup_diagnostic(w, statements->constant);
    w.end_object();
  }
  write_tolerances(w, p.tols);
  w.end_object();
  return w.str();
}

inline std::string audit_example2_json(const Example2Audit& audit) {
  JsonWriter w;
  w.begin_object();
  w.key("claimed_multiplier").value("rho(x) = exp(-x1)");
  w.key("corrected_multiplier").value("rho_inf(x) = (1 + 3 x2^2)^2 exp(-x1)");
  w.key("points").begin_array();
  for (const auto& pt : audit.points) {
    w.begin_object();
    w.key("x").point(pt.x);
    w.key("lambda_max_claimed").value(pt.lambda_max_claimed);
    w.key("status").value(pt.status);
    w.key("rho_claimed").value(pt.rho_claimed);
    w.key("rho_inf").value(pt.rho_inf);
    w.key("rho_closed_form").value(pt.rho_closed_form);
    w.end_object();
  }
  w.end_array();
  w.key("summary").begin_object();
  w.key("points").value(audit.points.size());
  w.key("violations").value(audit.violations);
  w.key("boundary").value(audit.boundary_count);
  w.key("max_lambda").value(audit.max_lambda);
  w.key("claim_holds_strictly").value(audit.violations == 0 && audit.boundary_count == 0);
  w.end_object();
  w.end_object();
  return w.str();
}

inline std::string audit_example2_csv(const Example2Audit& audit) {
  std::string out = "x1,x2,lambda_max_claimed,status,rho_claimed,rho_inf,rho_closed_form\n";
  for (const auto& pt : audit.points) {
    out += fmt_e(pt.x[0]) + "," + fmt_e(pt.x[1]) + "," + fmt_e(pt.lambda_max_claimed) + "," +
           pt.status + "," + fmt_e(pt.rho_claimed) + "," + fmt_e(pt.rho_inf) + "," +
           fmt_e(pt.rho_closed_form) + "\n";
  }
  return out;
}

}  // namespace io
}  // namespace finsler
