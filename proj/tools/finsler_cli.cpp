// Command-line front end: certify Finsler LMI feasibility, profile
// mu_inf over parameter domains, synthesize multipliers, run bound tests,
// certify switching mode sets, and generate/export polytopic LMI
// relaxations in sparse SDPA format.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "finsler/finsler.hpp"
#include "finsler/json_io.hpp"

namespace {

using namespace finsler;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct CommonOpts {
  std::string input;
  std::string out_dir;
  std::string format = "json";
  double def_tol = -1.0;
  double rank_tol = -1.0;
  double bisect_tol = -1.0;
  double margin = 1e-6;
  double eps = 1e-6;
  int grid_refine = 0;

  Tolerances apply(Tolerances t) const {
    if (def_tol >= 0) t.def_tol = def_tol;
    if (rank_tol >= 0) t.rank_tol = rank_tol;
    if (bisect_tol >= 0) {
      t.bisect_abs = bisect_tol;
      t.bisect_rel = bisect_tol;
    }
    t.validate();
    return t;
  }
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_input = true) {
  auto* in = cmd->add_option("--input", opts.input, "Input JSON file");
  if (needs_input) in->required();
  cmd->add_option("--out", opts.out_dir, "Output directory for report files");
  cmd->add_option("--def-tol", opts.def_tol, "Relative definiteness tolerance");
  cmd->add_option("--rank-tol", opts.rank_tol, "Relative rank tolerance");
  cmd->add_option("--bisect-tol", opts.bisect_tol, "Bisection tolerance (absolute and relative)");
  cmd->add_option("--margin", opts.margin, "Margin added over suprema/infima");
  cmd->add_option("--eps", opts.eps, "Epsilon for the continuous multiplier");
  cmd->add_option("--grid-refine", opts.grid_refine, "Domain refinement levels before analysis");
  cmd->add_option("--format", opts.format, "Output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

int thread_budget() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FINSLER_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) return static_cast<int>(std::min<long>(cap, hw));
  }
  return static_cast<int>(hw);
}

void emit(const CommonOpts& opts, const std::string& text, const std::string& filename) {
  std::cout << text;
  if (!opts.out_dir.empty()) {
    std::filesystem::create_directories(opts.out_dir);
    const std::string path = opts.out_dir + "/" + filename;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + path);
    out << text;
  }
}

int cmd_certify(const CommonOpts& opts) {
  const io::Problem prob = io::problem_from_json(io::load_json_file(opts.input));
  const Tolerances tols = opts.apply(prob.tols);
  if (!prob.has_domain()) {
    const FinslerCertificate cert = certify(*prob.q, *prob.b, tols);
    emit(opts, io::certificate_json(cert), "report.json");
    return cert.verdict_f4 ? kExitOk : kExitInfeasible;
  }
  const ParamDomain dom = prob.dom->refined(opts.grid_refine);
  const MuProfile p = profile(*prob.qf, *prob.bf, dom, tols, thread_budget());
  const GridStatements st = grid_statements(*prob.qf, *prob.bf, dom, tols, thread_budget());
  emit(opts, io::profile_json(p, &st), "report.json");
  return p.any_infeasible ? kExitInfeasible : kExitOk;
}

int cmd_profile(const CommonOpts& opts) {
  const io::Problem prob = io::problem_from_json(io::load_json_file(opts.input));
  if (!prob.has_domain()) throw InvalidInput("profile: input needs a domain");
  const Tolerances tols = opts.apply(prob.tols);
  const ParamDomain dom = prob.dom->refined(opts.grid_refine);
  const MuProfile p = profile(*prob.qf, *prob.bf, dom, tols, thread_budget());
  if (opts.format == "csv") {
    emit(opts, io::profile_csv(p), "profile.csv");
  } else {
    const GridStatements st = grid_statements(*prob.qf, *prob.bf, dom, tols, thread_budget());
    emit(opts, io::profile_json(p, &st), "profile.json");
  }
  return p.any_infeasible ? kExitInfeasible : kExitOk;
}

int cmd_synth(const CommonOpts& opts, const std::string& mode) {
  const io::Problem prob = io::problem_from_json(io::load_json_file(opts.input));
  if (!prob.has_domain()) throw InvalidInput("synth: input needs a domain");
  const Tolerances tols = opts.apply(prob.tols);
  const ParamDomain dom = prob.dom->refined(opts.grid_refine);

  if (mode == "constant") {
    const MuProfile p = profile(*prob.qf, *prob.bf, dom, tols, thread_budget());
    const ExtendedReal mu_bar = synth_constant(p, opts.margin);
    JsonWriter w;
    w.begin_object();
    w.key("mode").value("constant");
    w.key("margin").value(opts.margin);
    w.key("sup_mu_inf").value(p.sup_mu_inf);
    w.key("mu_bar").value(mu_bar);
    w.key("verified").value(mu_bar.is_finite());
    w.end_object();
    emit(opts, w.str(), "synth.json");
    return mu_bar.is_finite() ? kExitOk : kExitInfeasible;
  }

  // continuous
  try {
    const ContinuousMu mu = synth_continuous(*prob.qf, *prob.bf, dom, opts.eps, tols,
                                             thread_budget());
    if (opts.format == "csv") {
      std::string out;
      const int d = dom.dim();
      for (int a = 1; a <= d; ++a) out += "s" + std::to_string(a) + ",";
      out += "mu\n";
      for (std::size_t i = 0; i < mu.profile().points.size(); ++i) {
        for (double v : mu.profile().points[i]) out += fmt_e(v) + ",";
        out += fmt_e(mu.grid_values()[i]) + "\n";
      }
      emit(opts, out, "synth.csv");
    } else {
      JsonWriter w;
      w.begin_object();
      w.key("mode").value("continuous");
      w.key("eps").value(opts.eps);
      w.key("points").begin_array();
      for (std::size_t i = 0; i < mu.profile().points.size(); ++i) {
        w.begin_object();
        w.key("s").point(mu.profile().points[i]);
        w.key("mu").value(mu.grid_values()[i]);
        w.end_object();
      }
      w.end_array();
      w.key("verified").value(true);
      w.end_object();
      emit(opts, w.str(), "synth.json");
    }
    return kExitOk;
  } catch (const Infeasible& e) {
    JsonWriter w;
    w.begin_object();
    w.key("mode").value("continuous");
    w.key("infeasible").value(true);
    w.key("message").value(e.what());
    w.end_object();
    emit(opts, w.str(), "synth.json");
    return kExitInfeasible;
  }
}

int cmd_bounds(const CommonOpts& opts) {
  const Json j = io::load_json_file(opts.input);
  const io::BoundsProblem bp = io::bounds_from_json(j);
  const Tolerances tols = opts.apply(bp.tols);
  const ParamDomain dom = bp.dom.refined(opts.grid_refine);

  JsonWriter w;
  w.begin_object();
  bool necessary_ok = true;
  if (j.contains("ell_Q") && j.contains("u_R")) {
    const SupDiagnostic nec = bound_test_necessary_diag(bp.bounds, dom);
    necessary_ok = nec.verdict;
    w.key("necessary");
    io::write_sup_diagnostic(w, nec);
  }
  if (j.contains("u_Q") && j.contains("ell_R")) {
    w.key("sufficient");
    io::write_sup_diagnostic(w, bound_test_sufficient_diag(bp.bounds, dom));
  }
  if (bp.qf && bp.bf) {
    if (j.contains("ell_Q") && j.contains("u_Q") && j.contains("ell_R") && j.contains("u_R")) {
      validate_bounds(bp.bounds, *bp.qf, *bp.bf, dom, tols);
      w.key("bounds_validated").value(true);
    }
    if (bp.qf->rows() == 1 && bp.bf->rows() == 1 && bp.bf->cols() == 1) {
      const ScalarBoundReport sc = bound_test_scalar_diag(*bp.qf, *bp.bf, dom, tols);
      w.key("scalar").begin_object();
      w.key("zero_set_ok").value(sc.zero_set_ok);
      w.key("positive_set");
      io::write_sup_diagnostic(w, sc.positive_set);
      w.key("verdict").value(sc.verdict);
      w.end_object();
    }
  }
  if (j.contains("u_Q") && j.contains("ell_R")) {
    w.key("synthesis");
    try {
      const double mu_bar = synth_from_bounds(bp.bounds, dom, bp.qf ? &*bp.qf : nullptr,
                                              bp.bf ? &*bp.bf : nullptr, tols);
      w.begin_object();
      w.key("applicable").value(true);
      w.key("mu_bar").value(mu_bar);
      w.end_object();
    } catch (const NotApplicable& e) {
      w.begin_object();
      w.key("applicable").value(false);
      w.key("message").value(e.what());
      w.end_object();
    }
  }
  w.end_object();
  emit(opts, w.str(), "bounds.json");
  return necessary_ok ? kExitOk : kExitInfeasible;
}

int cmd_switching(const CommonOpts& opts) {
  const Json j = io::load_json_file(opts.input);
  const Tolerances tols = opts.apply(io::tolerances_from_json(j.value("tolerances", Json())));

  if (j.contains("domain")) {
    // Piecewise-constant Q(s), B(s) over a domain.
    const io::Problem prob = io::problem_from_json(j);
    const ParamDomain dom = prob.dom->refined(opts.grid_refine);
    try {
      const MatrixFn mu = piecewise_mu(*prob.qf, *prob.bf, dom, opts.margin, tols);
      JsonWriter w;
      w.begin_object();
      w.key("kind").value("piecewise");
      w.key("margin").value(opts.margin);
      w.key("regions").begin_array();
      for (std::size_t r = 0; r < mu.regions().size(); ++r) {
        w.begin_object();
        w.key("box").begin_array();
        for (const auto& [lo, hi] : mu.regions()[r].box) {
          w.begin_array();
          w.value(lo);
          w.value(hi);
          w.end_array();
        }
        w.end_array();
        w.key("mu").value(mu.region_values()[r](0, 0));
        w.end_object();
      }
      w.end_array();
      w.end_object();
      emit(opts, w.str(), "switching.json");
      return kExitOk;
    } catch (const Infeasible& e) {
      JsonWriter w;
      w.begin_object();
      w.key("kind").value("piecewise");
      w.key("infeasible").value(true);
      w.key("message").value(e.what());
      w.end_object();
      emit(opts, w.str(), "switching.json");
      return kExitInfeasible;
    }
  }

  const ModeSet ms = io::modes_from_json(j);
  const ExtendedReal mu_bar = ms.paired ? certify_modes(ms, opts.margin, tols)
                                        : certify_product(ms, opts.margin, tols);
  JsonWriter w;
  w.begin_object();
  w.key("kind").value(ms.paired ? "modes" : "product");
  w.key("margin").value(opts.margin);
  w.key("mu_bar").value(mu_bar);
  w.key("mu_inf").begin_array();
  if (ms.paired) {
    for (std::size_t i = 0; i < ms.qs.size(); ++i)
      w.value(mu_inf(ms.qs[i], ms.bs[i], tols));
  } else {
    for (const auto& q : ms.qs)
      for (const auto& b : ms.bs) w.value(mu_inf(q, b, tols));
  }
  w.end_array();
  w.key("feasible").value(!mu_bar.is_pos_inf());
  w.end_object();
  emit(opts, w.str(), "switching.json");
  return mu_bar.is_pos_inf() ? kExitInfeasible : kExitOk;
}

int cmd_polytopic(const CommonOpts& opts, const std::string& form, int g_p, int g_x,
                  const std::string& candidate_path) {
  const Json j = io::load_json_file(opts.input);
  const Polytope p = io::polytope_from_json(j);
  LmiSet lmis;
  std::string form_name = form;
  if (form == "lyapunov") {
    lmis = gen_lyapunov_g1(p);
  } else if (form == "lyapunov-collected") {
    lmis = gen_lyapunov_g1_collected(p);
  } else {
    lmis = gen_finsler_form(p, g_p, g_x);
    form_name = "finsler";
  }

  JsonWriter w;
  w.begin_object();
  w.key("form").value(form_name);
  w.key("n").value(p.n);
  w.key("vertices").value(p.vertex_count());
  if (form_name == "finsler") {
    w.key("g_P").value(g_p);
    w.key("g_X").value(g_x);
    w.key("count_full").value(count_full(p.n, p.vertex_count(), g_p));
    w.key("count_reduced").value(count_reduced(p.n, p.vertex_count(), g_p));
  }
  w.key("scalar_variables").value(lmis.scalar_var_count());
  w.key("constraints").value(lmis.constraints.size());

  bool candidate_ok = true;
  if (!candidate_path.empty()) {
    const auto assign = io::assignment_from_json(io::load_json_file(candidate_path));
    const VerifyReport rep = verify_candidate(lmis, assign, opts.apply(Tolerances()));
    candidate_ok = rep.all_satisfied;
    w.key("candidate").begin_object();
    w.key("satisfied").value(rep.all_satisfied);
    w.key("constraints").begin_array();
    for (const auto& c : rep.constraints) {
      w.begin_object();
      w.key("name").value(c.name);
      w.key("sense").value(c.sense == Sense::neg_def ? "neg_def" : "pos_def");
      w.key("lambda_max").value(c.lambda_max);
      w.key("lambda_min").value(c.lambda_min);
      w.key("margin").value(c.margin);
      w.key("satisfied").value(c.satisfied);
      w.end_object();
    }
    w.end_array();
    w.end_object();
  }

  if (!opts.out_dir.empty()) {
    std::filesystem::create_directories(opts.out_dir);
    const std::string path = opts.out_dir + "/" + form_name + ".dat-s";
    export_sdpa(lmis, path);
    w.key("sdpa_file").value(path);
  }
  w.end_object();
  std::cout << w.str();
  if (!opts.out_dir.empty()) {
    std::ofstream out(opts.out_dir + "/polytopic.json", std::ios::binary);
    out << w.str();
  }
  return candidate_ok ? kExitOk : kExitInfeasible;
}

int cmd_counts(const CommonOpts& opts, int n, int nv, int g) {
  JsonWriter w;
  w.begin_object();
  w.key("n").value(n);
  w.key("N").value(nv);
  w.key("g").value(g);
  w.key("count_full").value(count_full(n, nv, g));
  w.key("count_reduced").value(count_reduced(n, nv, g));
  w.key("reduction").value(count_full(n, nv, g) - count_reduced(n, nv, g));
  w.end_object();
  emit(opts, w.str(), "counts.json");
  return kExitOk;
}

int cmd_audit_example2(const CommonOpts& opts, int grid_count) {
  const ParamDomain dom =
      ParamDomain::box({{-1.0, 1.0, grid_count}, {-1.0, 1.0, grid_count}})
          .refined(opts.grid_refine);
  const Example2Audit audit = audit_example2(dom, opts.apply(Tolerances()));
  if (opts.format == "csv")
    emit(opts, io::audit_example2_csv(audit), "audit_example2.csv");
  else
    emit(opts, io::audit_example2_json(audit), "audit_example2.json");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalue-based certificates for parameter-dependent Finsler LMIs"};
  app.require_subcommand(1);

  CommonOpts certify_opts, profile_opts, synth_opts, bounds_opts, switching_opts, polytopic_opts,
      counts_opts, audit_opts;

  auto* certify_cmd = app.add_subcommand("certify", "Certify one (Q, B) pair or a domain problem");
  add_common(certify_cmd, certify_opts);

  auto* profile_cmd = app.add_subcommand("profile", "Profile mu_inf over a parameter domain");
  add_common(profile_cmd, profile_opts);

  std::string synth_mode = "constant";
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize a constant or continuous multiplier");
  add_common(synth_cmd, synth_opts);
  synth_cmd->add_option("--mode", synth_mode, "constant or continuous")
      ->check(CLI::IsMember({"constant", "continuous"}));

  auto* bounds_cmd = app.add_subcommand("bounds", "Eigenvalue-envelope bound tests");
  add_common(bounds_cmd, bounds_opts);

  auto* switching_cmd =
      app.add_subcommand("switching", "Certificates for finite mode sets and piecewise problems");
  add_common(switching_cmd, switching_opts);

  std::string form = "finsler";
  int g_p = 1, g_x = 1;
  std::string candidate_path;
  auto* polytopic_cmd =
      app.add_subcommand("polytopic", "Generate polytopic LMI relaxations and export SDPA");
  add_common(polytopic_cmd, polytopic_opts);
  polytopic_cmd->add_option("--form", form, "lyapunov, lyapunov-collected, or finsler")
      ->check(CLI::IsMember({"lyapunov", "lyapunov-collected", "finsler"}));
  polytopic_cmd->add_option("--gp", g_p, "Degree of P(alpha)");
  polytopic_cmd->add_option("--gx", g_x, "Degree of X(alpha)");
  polytopic_cmd->add_option("--candidate", candidate_path, "Candidate assignment JSON to verify");

  int count_n = 1, count_nv = 1, count_g = 0;
  auto* counts_cmd = app.add_subcommand("counts", "Scalar variable counts of the relaxations");
  add_common(counts_cmd, counts_opts, /*needs_input=*/false);
  counts_cmd->add_option("--n", count_n, "State dimension")->required();
  counts_cmd->add_option("--N", count_nv, "Vertex count")->required();
  counts_cmd->add_option("--g", count_g, "Polynomial degree")->required();

  int audit_grid = 5;
  auto* audit_cmd =
      app.add_subcommand("audit-example2", "Audit the example2 family's claimed multiplier");
  add_common(audit_cmd, audit_opts, /*needs_input=*/false);
  audit_cmd->add_option("--grid-count", audit_grid, "Grid points per axis over [-1,1]^2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (certify_cmd->parsed()) return cmd_certify(certify_opts);
    if (profile_cmd->parsed()) return cmd_profile(profile_opts);
    if (synth_cmd->parsed()) return cmd_synth(synth_opts, synth_mode);
    if (bounds_cmd->parsed()) return cmd_bounds(bounds_opts);
    if (switching_cmd->parsed()) return cmd_switching(switching_opts);
    if (polytopic_cmd->parsed())
      return cmd_polytopic(polytopic_opts, form, g_p, g_x, candidate_path);
    if (counts_cmd->parsed()) return cmd_counts(counts_opts, count_n, count_nv, count_g);
    if (audit_cmd->parsed()) return cmd_audit_example2(audit_opts, audit_grid);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
