#pragma once

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "finsler/json_writer.hpp"
#include "finsler/polytopic.hpp"
#include "finsler/util.hpp"

namespace finsler {

// Sparse SDPA (.dat-s) problem: F(x) = sum_i x_i F_i - F0 >= 0, one block
// per constraint, entries 1-indexed upper triangle.
struct SdpaProblem {
  int num_vars = 0;
  std::vector<int> block_sizes;
  std::vector<double> objective;

  struct Entry {
    int matno = 0;  // 0 is F0, 1..m are variables
    int blkno = 1;
    int i = 1, j = 1;  // i <= j
    double value = 0.0;

    friend bool operator<(const Entry& a, const Entry& b) {
      if (a.matno != b.matno) return a.matno < b.matno;
      if (a.blkno != b.blkno) return a.blkno < b.blkno;
      if (a.i != b.i) return a.i < b.i;
      return a.j < b.j;
    }
    friend bool operator==(const Entry& a, const Entry& b) {
      return a.matno == b.matno && a.blkno == b.blkno && a.i == b.i && a.j == b.j &&
             a.value == b.value;
    }
  };
  std::vector<Entry> entries;

  void sort_entries() { std::sort(entries.begin(), entries.end()); }
};

// Feasibility encoding of an LmiSet: a < 0 constraint M becomes the block
// -M >= 0 (F_v = -coeff, F0 = c0); a > 0 constraint passes through.
// Strictness is not expressible in SDPA and is re-checked by the verifier.
inline SdpaProblem to_sdpa(const LmiSet& lmis) {
  SdpaProblem prob;
  prob.num_vars = lmis.scalar_var_count();
  prob.objective.assign(prob.num_vars, 0.0);
  for (std::size_t c = 0; c < lmis.constraints.size(); ++c) {
    const Constraint& con = lmis.constraints[c];
    const double sign = con.sense == Sense::neg_def ? -1.0 : 1.0;
    const int blk = static_cast<int>(c) + 1;
    prob.block_sizes.push_back(con.form.dim());
    for (int i = 0; i < con.form.dim(); ++i)
      for (int j = i; j < con.form.dim(); ++j) {
        const double f0 = -sign * con.form.constant_term()(i, j);
        if (f0 != 0.0) prob.entries.push_back({0, blk, i + 1, j + 1, f0});
      }
    for (const auto& [var, coeff] : con.form.coeffs())
      for (int i = 0; i < con.form.dim(); ++i)
        for (int j = i; j < con.form.dim(); ++j) {
          const double v = sign * coeff(i, j);
          if (v != 0.0) prob.entries.push_back({var + 1, blk, i + 1, j + 1, v});
        }
  }
  prob.sort_entries();
  return prob;
}

// Canonical text form; writing the parse of a canonical file reproduces it
// byte for byte.
inline void write_sdpa(const SdpaProblem& prob, std::ostream& os) {
  os << prob.num_vars << "\n";
  os << prob.block_sizes.size() << "\n";
  for (std::size_t i = 0; i < prob.block_sizes.size(); ++i)
    os << (i ? " " : "") << prob.block_sizes[i];
  os << "\n";
  for (std::size_t i = 0; i < prob.objective.size(); ++i)
    os << (i ? " " : "") << fmt_g17(prob.objective[i]);
  os << "\n";
  for (const auto& e : prob.entries)
    os << e.matno << " " << e.blkno << " " << e.i << " " << e.j << " " << fmt_g17(e.value)
       << "\n";
}

inline std::string sdpa_string(const SdpaProblem& prob) {
  std::ostringstream os;
  write_sdpa(prob, os);
  return os.str();
}

inline SdpaProblem parse_sdpa(std::istream& is) {
  std::vector<std::string> lines;
  std::string raw;
  while (std::getline(is, raw)) {
    if (!raw.empty() && (raw[0] == '"' || raw[0] == '*')) continue;  // comment
    for (char& c : raw)
      if (c == ',' || c == '(' || c == ')' || c == '{' || c == '}') c = ' ';
    if (raw.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(raw);
  }
  if (lines.size() < 4) throw InvalidInput("sdpa: truncated file");

  SdpaProblem prob;
  std::istringstream l0(lines[0]), l1(lines[1]), l2(lines[2]), l3(lines[3]);
  int nblocks = 0;
  if (!(l0 >> prob.num_vars) || prob.num_vars < 0) throw InvalidInput("sdpa: bad variable count");
  if (!(l1 >> nblocks) || nblocks <= 0) throw InvalidInput("sdpa: bad block count");
  for (int b = 0; b < nblocks; ++b) {
    int size = 0;
    if (!(l2 >> size)) throw InvalidInput("sdpa: bad block structure");
    // Negative sizes denote diagonal blocks in the wild; stored dense here.
    prob.block_sizes.push_back(std::abs(size));
  }
  for (int v = 0; v < prob.num_vars; ++v) {
    double c = 0.0;
    if (!(l3 >> c)) throw InvalidInput("sdpa: bad objective vector");
    prob.objective.push_back(c);
  }
  for (std::size_t l = 4; l < lines.size(); ++l) {
    std::istringstream ls(lines[l]);
    SdpaProblem::Entry e;
    if (!(ls >> e.matno >> e.blkno >> e.i >> e.j >> e.value))
      throw InvalidInput("sdpa: bad entry line: " + lines[l]);
    if (e.matno < 0 || e.matno > prob.num_vars) throw InvalidInput("sdpa: entry matno out of range");
    if (e.blkno < 1 || e.blkno > nblocks) throw InvalidInput("sdpa: entry blkno out of range");
    const int size = prob.block_sizes[e.blkno - 1];
    if (e.i < 1 || e.j < e.i || e.j > size) throw InvalidInput("sdpa: entry index out of range");
    prob.entries.push_back(e);
  }
  prob.sort_entries();
  return prob;
}

inline SdpaProblem parse_sdpa_string(const std::string& text) {
  std::istringstream is(text);
  return parse_sdpa(is);
}

// Sidecar map from 1-based SDPA variable indices to (matrix name, row, col)
// plus the block roster, so exported files stay self-describing.
inline std::string sdpa_sidecar_json(const LmiSet& lmis) {
  JsonWriter w;
  w.begin_object();
  w.key("num_scalar_variables").value(lmis.scalar_var_count());
  w.key("variables").begin_array();
  for (int k = 0; k < lmis.scalar_var_count(); ++k) {
    const auto& sv = lmis.scalar_vars[k];
    const auto& mv = lmis.variables[sv.matrix_var];
    w.begin_object();
    w.key("index").value(k + 1);
    w.key("name").value(mv.name);
    w.key("row").value(sv.row);
    w.key("col").value(sv.col);
    w.end_object();
  }
  w.end_array();
  w.key("blocks").begin_array();
  for (std::size_t c = 0; c < lmis.constraints.size(); ++c) {
    w.begin_object();
    w.key("index").value(c + 1);
    w.key("name").value(lmis.constraints[c].name);
    w.key("size").value(lmis.constraints[c].form.dim());
    w.key("sense").value(lmis.constraints[c].sense == Sense::neg_def ? "neg_def" : "pos_def");
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

// Writes path and a .vars.json sidecar next to it.
inline void export_sdpa(const LmiSet& lmis, const std::string& path) {
  const SdpaProblem prob = to_sdpa(lmis);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("export_sdpa: cannot open " + path);
  write_sdpa(prob, out);
  if (!out) throw InvalidInput("export_sdpa: write failed for " + path);

  std::string side = path;
  const std::string suffix = ".dat-s";
  if (side.size() > suffix.size() && side.compare(side.size() - suffix.size(), suffix.size(), suffix) == 0)
    side.resize(side.size() - suffix.size());
  side += ".vars.json";
  std::ofstream sidecar(side, std::ios::binary);
  if (!sidecar) throw InvalidInput("export_sdpa: cannot open " + side);
  sidecar << sdpa_sidecar_json(lmis);
}

// Margins of a parsed SDPA problem at x: per block the slack matrix is
// S = sum x_v F_v - F0 and the margin is lambda_min(S), which coincides
// with verify_candidate's margin for both constraint senses.
inline VerifyReport verify_sdpa(const SdpaProblem& prob, const std::vector<double>& x,
                                const Tolerances& tols = {}) {
  if (static_cast<int>(x.size()) != prob.num_vars)
    throw InvalidInput("verify_sdpa: assignment has wrong length");
  VerifyReport rep;
  for (std::size_t b = 0; b < prob.block_sizes.size(); ++b) {
    SymMatrix s(prob.block_sizes[b]);
    for (const auto& e : prob.entries) {
      if (e.blkno != static_cast<int>(b) + 1) continue;
      const double w = e.matno == 0 ? -1.0 : x[e.matno - 1];
      s.set(e.i - 1, e.j - 1, s(e.i - 1, e.j - 1) + w * e.value);
    }
    const EigenSym eig = eig_sym(s);
    ConstraintReport r;
    r.name = "block_" + std::to_string(b + 1);
    r.sense = Sense::pos_def;
    r.lambda_max = eig.values.back();
    r.lambda_min = eig.values.front();
    r.margin = r.lambda_min;
    r.satisfied = r.margin >= tols.def_tol * (1.0 + s.max_abs());
    rep.all_satisfied = rep.all_satisfied && r.satisfied;
    rep.constraints.push_back(std::move(r));
  }
  return rep;
}

}  // namespace finsler
