// Command-line front end: classification, MMOT solves with duality
// certificates, BVP solves, decoupling verification, rectangular
// rearrangement and reproduction of the worked examples.
//
// Exit codes: 0 all checks pass, 1 a mathematical check failed,
// 2 configuration or IO error.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "otsys/cases.hpp"
#include "otsys/mmot.hpp"
#include "otsys/rearrange.hpp"

namespace fs = std::filesystem;
using namespace otsys;

namespace {

struct CommonArgs {
  std::string spec_name;
  std::string spec_config;
  int m = 0;
  std::uint64_t seed = SampleGrid::kDefaultSeed;
  int resolution = 0;
  std::string out_dir = "otsys-out";
  double tol_sign = tol::sign;
  double tol_dual = tol::dual;
  double tol_decouple = tol::decouple;
  double tol_rearr = tol::rearr;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool spec_required = true) {
  auto* s = cmd->add_option("--spec", a.spec_name, "built-in spec name");
  auto* c = cmd->add_option("--spec-config", a.spec_config,
                            "path to a key = value spec config");
  if (spec_required) {
    s->excludes(c);
    c->excludes(s);
  }
  cmd->add_option("--m", a.m, "number of components");
  cmd->add_option("--seed", a.seed, "seed for sampled grids");
  cmd->add_option("--resolution", a.resolution, "per-axis grid resolution");
  cmd->add_option("--out", a.out_dir, "output directory");
  cmd->add_option("--tol-sign", a.tol_sign, "strict-sign margin");
  cmd->add_option("--tol-dual", a.tol_dual, "duality tolerance");
  cmd->add_option("--tol-decouple", a.tol_decouple, "decoupling tolerance");
  cmd->add_option("--tol-rearr", a.tol_rearr, "rearrangement tolerance");
}

Nonlinearity load_spec(const CommonArgs& a) {
  if (!a.spec_config.empty()) {
    SpecConfig cfg = parse_spec_config_file(a.spec_config);
    if (a.m > 0) cfg.m = a.m;
    if (a.seed != SampleGrid::kDefaultSeed) cfg.seed = a.seed;
    return make_spec(cfg);
  }
  if (a.spec_name.empty())
    throw std::runtime_error("one of --spec / --spec-config is required");
  return make_spec(a.spec_name, a.m, a.seed);
}

void ensure_out(const CommonArgs& a) { fs::create_directories(a.out_dir); }

int finish(const CommonArgs& a, Report& rep, const std::string& filename) {
  ensure_out(a);
  std::string path = a.out_dir + "/" + filename;
  rep.write_json_file(path);
  for (const Check& c : rep.checks)
    std::cout << (c.pass ? "PASS  " : "FAIL  ") << c.name << "  value="
              << c.value
              << (c.tolerance ? "  tol=" + std::to_string(*c.tolerance) : "")
              << "\n";
  std::cout << (rep.pass() ? "OK" : "FAILED: " + rep.first_failure()) << "  ("
            << path << ")\n";
  return rep.pass() ? 0 : 1;
}

nlohmann::json witness_json(const std::optional<Witness>& w) {
  if (!w) return nullptr;
  return {{"point", w->point}, {"pair_or_triple", w->indices}, {"value", w->value}};
}

int cmd_analyze(const CommonArgs& a) {
  Nonlinearity spec = load_spec(a);
  SampleGrid grid = a.resolution > 0
                        ? SampleGrid::tensor(spec.domain(), a.resolution)
                        : SampleGrid::standard(spec.domain(), a.seed);
  EquivalenceReport eq = verify_equivalence(spec, grid, a.tol_sign);

  auto verdict_str = [](Verdict v) {
    return v == Verdict::pass ? "pass" : v == Verdict::fail ? "fail" : "degenerate";
  };
  nlohmann::json cls;
  cls["verdict"] = eq.all_pass ? "orientable" : "not-orientable";
  cls["orientability"] = verdict_str(eq.orientability.verdict);
  cls["compatibility"] = verdict_str(eq.compatibility.verdict);
  cls["compatibility_vacuous"] = eq.compatibility.vacuous;
  if (eq.submodularity_after_flip)
    cls["submodularity_after_flip"] =
        verdict_str(eq.submodularity_after_flip->verdict);
  if (eq.orientability.theta) cls["theta"] = eq.orientability.theta->theta;
  if (eq.sigma) cls["sigma"] = *eq.sigma;
  cls["witnesses"] = nlohmann::json::array();
  if (auto w = witness_json(eq.orientability.witness); !w.is_null())
    cls["witnesses"].push_back(w);
  if (auto w = witness_json(eq.compatibility.witness); !w.is_null())
    cls["witnesses"].push_back(w);
  if (eq.submodularity_after_flip) {
    if (auto w = witness_json(eq.submodularity_after_flip->smooth_witness);
        !w.is_null())
      cls["witnesses"].push_back(w);
    if (auto w = witness_json(eq.submodularity_after_flip->fourpoint_witness);
        !w.is_null())
      cls["witnesses"].push_back(w);
  }
  cls["grid"] = {{"strategy", grid.strategy},
                 {"seed", grid.seed},
                 {"count", grid.points.size()}};

  Report rep;
  rep.command = "analyze";
  rep.seed = grid.seed;
  rep.params = {{"spec", spec.name()}, {"m", spec.m()}, {"classification", cls}};
  rep.add("classifiers-consistent", eq.consistent, eq.all_pass ? 1.0 : 0.0,
          std::nullopt, eq.all_pass ? "orientable" : "not orientable");

  ensure_out(a);
  std::string cls_path = a.out_dir + "/analysis.json";
  {
    std::ofstream out(cls_path);
    out << cls.dump(2) << "\n";
  }
  rep.outputs["analysis.json"] = cls_path;
  return finish(a, rep, "analyze_report.json");
}

int cmd_mmot(const CommonArgs& a, const std::vector<std::string>& marginal_files,
             const std::string& forced_orientation) {
  Nonlinearity spec = load_spec(a);
  if (static_cast<int>(marginal_files.size()) != spec.m())
    throw std::runtime_error("need exactly m marginal CSVs");
  std::vector<DiscreteMarginal> marginals;
  for (const auto& f : marginal_files)
    marginals.push_back(read_marginal_csv_file(f));

  Report rep;
  rep.command = "mmot";
  rep.params = {{"spec", spec.name()}, {"m", spec.m()}};

  Orientation theta;
  if (!forced_orientation.empty()) {
    std::stringstream ss(forced_orientation);
    std::string tok;
    while (std::getline(ss, tok, ',')) theta.theta.push_back(std::stoi(tok));
    if (theta.size() != spec.m())
      throw std::runtime_error("--orientation length must equal m");
    rep.params["orientation"] = theta.theta;
  } else {
    SampleGrid grid = SampleGrid::standard(spec.domain(), a.seed);
    auto orient = check_orientable(spec, grid, a.tol_sign);
    rep.add("spec-orientable", orient.orientable(),
            orient.orientable() ? 1.0 : 0.0);
    if (!orient.orientable()) return finish(a, rep, "mmot_report.json");
    theta = *orient.theta;
    rep.params["orientation"] = theta.theta;
  }

  MonotoneCoupling coupling = solve_monotone(marginals, theta);
  PathPotentials pots = build_potentials(coupling, spec);
  DualityCertificate cert = certify(coupling, pots, spec, a.resolution);
  rep.add("certificate", cert.pass(a.tol_dual),
          std::max(cert.max_feasibility_violation, cert.max_support_gap),
          a.tol_dual);
  rep.add("primal-dual-gap", std::abs(cert.primal_cost - cert.dual_value) <=
                                 a.tol_dual * (1.0 + std::abs(cert.primal_cost)),
          std::abs(cert.primal_cost - cert.dual_value));

  // Brute-force oracle when the instance is inside the enumeration bounds.
  bool oracle_ok = true;
  try {
    OracleResult oracle = brute_force_oracle(marginals, spec);
    double mono_cost = coupling_cost(coupling, spec);
    oracle_ok = mono_cost - oracle.min_cost <= 1e-12;
    rep.add("oracle-agreement", oracle_ok, mono_cost - oracle.min_cost, 1e-12);
  } catch (const std::invalid_argument&) {
    // outside the oracle's bounds; skip
  }

  ensure_out(a);
  std::string coupling_path = a.out_dir + "/coupling.csv";
  write_coupling_csv_file(coupling_path, coupling);
  rep.outputs["coupling.csv"] = coupling_path;
  nlohmann::json cj = {{"primal", cert.primal_cost},
                       {"dual", cert.dual_value},
                       {"max_violation", cert.max_feasibility_violation},
                       {"max_support_gap", cert.max_support_gap},
                       {"pass", cert.pass(a.tol_dual)}};
  std::string cert_path = a.out_dir + "/certificate.json";
  {
    std::ofstream out(cert_path);
    out << cj.dump(2) << "\n";
  }
  rep.outputs["certificate.json"] = cert_path;
  return finish(a, rep, "mmot_report.json");
}

std::vector<std::pair<double, double>> parse_boundary(const std::string& text,
                                                      int m) {
  std::vector<std::pair<double, double>> bc;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t colon = tok.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error("boundary format: a1:b1,a2:b2,...");
    bc.emplace_back(std::stod(tok.substr(0, colon)),
                    std::stod(tok.substr(colon + 1)));
  }
  if (static_cast<int>(bc.size()) != m)
    throw std::runtime_error("boundary must list one a:b pair per component");
  return bc;
}

std::vector<std::pair<double, double>> default_boundary(
    const Nonlinearity& spec, double L) {
  if (spec.name() == "ac-quadratic" || spec.name() == "ac-logsumexp") {
    double b = std::tanh(L / 1.4142135623730951);
    return std::vector<std::pair<double, double>>(spec.m(), {-b, b});
  }
  if (spec.name() == "quadratic-coupling")
    return {{0.01, 3.0}, {3.0, 0.01}};
  throw std::runtime_error("no default boundary for spec " + spec.name() +
                           "; pass --boundary");
}

int cmd_solve(const CommonArgs& a, double L, int n, const std::string& boundary) {
  Nonlinearity spec = load_spec(a);
  Mesh1D mesh(-L, L, n);
  auto bc = boundary.empty() ? default_boundary(spec, L)
                             : parse_boundary(boundary, spec.m());
  // widen the box if the requested data leaves the default domain
  Box box = spec.domain();
  bool widened = false;
  for (int i = 0; i < spec.m(); ++i) {
    for (double v : {bc[i].first, bc[i].second}) {
      if (v < box[i].lo) box[i].lo = v, widened = true;
      if (v > box[i].hi) box[i].hi = v, widened = true;
    }
  }
  if (widened) spec = spec.with_domain(box);

  std::optional<FieldBundle> guess;
  if (spec.name() == "ac-quadratic" || spec.name() == "ac-logsumexp")
    guess = FieldBundle::ramp(mesh, bc);
  auto [field, srep] = solve_system_bvp(spec, mesh, bc, guess);

  Report rep;
  rep.command = "solve";
  rep.params = {{"spec", spec.name()}, {"m", spec.m()}, {"L", L}, {"n", n}};
  rep.add("bvp-converged", srep.converged, srep.final_residual, tol::newton);
  rep.params["iterations"] = srep.iterations;

  ensure_out(a);
  std::string field_path = a.out_dir + "/profile.csv";
  write_field_csv_file(field_path, field);
  rep.outputs["profile.csv"] = field_path;
  nlohmann::json sj = {{"iterations", srep.iterations},
                       {"final_residual", srep.final_residual},
                       {"converged", srep.converged},
                       {"residual_history", srep.residual_history},
                       {"damping_history", srep.damping_history}};
  std::string spath = a.out_dir + "/solve_report.json";
  {
    std::ofstream out(spath);
    out << sj.dump(2) << "\n";
  }
  rep.outputs["solve_report.json"] = spath;
  return finish(a, rep, "report.json");
}

int cmd_decouple(const CommonArgs& a, const std::string& input) {
  Nonlinearity spec = load_spec(a);
  FieldBundle field = read_field_csv_file(input);
  if (field.m() != spec.m())
    throw std::runtime_error("field component count != spec m");

  Report rep;
  rep.command = "decouple";
  rep.params = {{"spec", spec.name()}, {"m", spec.m()}, {"input", input}};

  auto mono = check_monotone(field);
  bool mono_ok = true;
  for (const auto& v : mono) mono_ok = mono_ok && v.monotone();
  rep.add("monotone", mono_ok, mono_ok ? 1.0 : 0.0);
  if (!mono_ok) return finish(a, rep, "decouple_report.json");

  DecouplingPotentials dec = build_decoupling(field, spec);
  double identity = verify_on_solution_identity(field, dec, spec);
  rep.add("on-solution-identity", identity <= a.tol_decouple, identity,
          a.tol_decouple);
  auto global = verify_global_inequality(field, dec, spec, a.resolution);
  rep.add("global-inequality", global.max_violation <= a.tol_decouple,
          global.max_violation, a.tol_decouple,
          global.sense == InequalitySense::less_equal ? "sense <=" : "sense >=");
  double dres = verify_decoupled_pde(field, dec);
  double dtol = std::max(a.tol_decouple, 10.0 * dec.source_residual);
  rep.add("decoupled-residual", dres <= dtol, dres, dtol);
  ModicaReport modica = modica_check(field, dec, spec);
  if (modica.applicable)
    rep.add("modica-estimate", modica.pass.value_or(false),
            modica.max_violation, a.tol_decouple + modica.fd_margin);

  ensure_out(a);
  write_potentials_csv_file(a.out_dir + "/potentials", dec);
  nlohmann::json manifest;
  manifest["gauge"] = {{"base_node", dec.gauge.base_node},
                       {"joint_shift", dec.gauge.joint_shift}};
  manifest["source_residual"] = dec.source_residual;
  manifest["ranges"] = nlohmann::json::array();
  for (int i = 0; i < spec.m(); ++i)
    manifest["ranges"].push_back({dec.table(i).lo(), dec.table(i).hi()});
  manifest["checks"] = {{"on_solution_identity", identity},
                        {"global_inequality_violation", global.max_violation},
                        {"decoupled_residual", dres},
                        {"modica_violation", modica.max_violation},
                        {"modica_applicable", modica.applicable}};
  std::string mpath = a.out_dir + "/potentials_manifest.json";
  {
    std::ofstream out(mpath);
    out << manifest.dump(2) << "\n";
  }
  rep.outputs["potentials_manifest.json"] = mpath;
  return finish(a, rep, "decouple_report.json");
}

int cmd_rearrange(const CommonArgs& a, const std::string& input, int base_axes) {
  Nonlinearity spec = load_spec(a);
  BoxField box = read_boxfield_csv_file(input, base_axes);
  if (box.m() != spec.m())
    throw std::runtime_error("box field component count != spec m");

  Report rep;
  rep.command = "rearrange";
  rep.params = {{"spec", spec.name()}, {"m", spec.m()}, {"input", input}};

  EnergyDecreaseReport ed = verify_energy_decrease(box, spec, a.tol_rearr);
  rep.params["consistency_ok"] = ed.consistency_ok;
  rep.params["energy_before"] = {{"dirichlet", ed.before.dirichlet},
                                 {"potential", ed.before.potential},
                                 {"total", ed.before.total}};
  rep.params["energy_after"] = {{"dirichlet", ed.after.dirichlet},
                                {"potential", ed.after.potential},
                                {"total", ed.after.total}};
  rep.add("dirichlet-non-increasing",
          ed.after.dirichlet <= ed.before.dirichlet + a.tol_rearr,
          ed.before.dirichlet - ed.after.dirichlet);
  if (ed.consistency_ok)
    rep.add("potential-non-increasing",
            ed.after.potential <= ed.before.potential + a.tol_rearr,
            ed.before.potential - ed.after.potential);

  // equimeasurability of the rearranged profile
  double tv = 0.0;
  for (int i = 0; i < spec.m(); ++i)
    tv = std::max(tv, DiscreteMarginal::tv_distance(
                          ed.rearranged.slices.marginal(i),
                          ed.rearranged.marginals[i]));
  rep.add("equimeasurable", tv <= 1e-10, tv, 1e-10);

  ensure_out(a);
  std::string ppath = a.out_dir + "/rearranged_profile.csv";
  write_field_csv_file(ppath, ed.rearranged.profile);
  rep.outputs["rearranged_profile.csv"] = ppath;
  return finish(a, rep, "rearrange_report.json");
}

int cmd_examples(const CommonArgs& a, const std::string& case_name, double L,
                 int n, const std::string& signs_text) {
  Report rep;
  std::string out = a.out_dir;
  fs::create_directories(out);
  if (case_name == "ac-quadratic") {
    rep = run_ac_quadratic(a.m > 0 ? a.m : 2, L > 0 ? L : 10.0,
                           n > 0 ? n : 401, out);
  } else if (case_name == "ac-logsumexp") {
    int m = a.m > 0 ? a.m : 2;
    std::vector<int> signs(m, 1);
    for (int i = 0; i < std::min<int>(m, signs_text.size()); ++i)
      signs[i] = signs_text[i] == '-' ? -1 : 1;
    rep = run_ac_logsumexp(m, signs, L > 0 ? L : 10.0, n > 0 ? n : 401, out);
  } else if (case_name == "quadratic-coupling") {
    rep = run_quadratic_coupling(L > 0 ? L : 12.0, n > 0 ? n : 601,
                                 {0.01, 3.0}, {3.0, 0.01}, out);
  } else {
    throw std::runtime_error("unknown case: " + case_name);
  }
  return finish(a, rep, "examples_report.json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-marginal transport / elliptic system toolkit"};
  app.require_subcommand(1);

  CommonArgs a;
  std::vector<std::string> marginal_files;
  std::string forced_orientation, boundary, input, case_name, signs;
  double L = 0.0;
  int n = 0, base_axes = 1;

  auto* analyze = app.add_subcommand("analyze", "classify a nonlinearity");
  add_common(analyze, a);

  auto* mmot = app.add_subcommand("mmot", "monotone coupling + certificate");
  add_common(mmot, a);
  mmot->add_option("--marginal", marginal_files, "marginal CSV (repeat m times)")
      ->required();
  mmot->add_option("--orientation", forced_orientation,
                   "comma-separated +-1 overrides");

  auto* solve = app.add_subcommand("solve", "solve the coupled BVP");
  add_common(solve, a);
  solve->add_option("--L", L, "half-width of the interval");
  solve->add_option("--n", n, "number of mesh nodes");
  solve->add_option("--boundary", boundary, "a1:b1,a2:b2,...");

  auto* dec = app.add_subcommand("decouple", "build and verify potentials");
  add_common(dec, a);
  dec->add_option("--input", input, "field CSV")->required();

  auto* rearr = app.add_subcommand("rearrange", "rectangular rearrangement");
  add_common(rearr, a);
  rearr->add_option("--input", input, "box field CSV")->required();
  rearr->add_option("--base-axes", base_axes, "1 or 2 Omega axes");

  auto* ex = app.add_subcommand("examples", "run a worked example pipeline");
  add_common(ex, a, false);
  ex->add_option("--case", case_name, "ac-quadratic | ac-logsumexp | quadratic-coupling")
      ->required();
  ex->add_option("--L", L, "half-width of the interval");
  ex->add_option("--n", n, "number of mesh nodes");
  ex->add_option("--signs", signs, "e.g. ++- for ac-logsumexp");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return cmd_analyze(a);
    if (mmot->parsed()) return cmd_mmot(a, marginal_files, forced_orientation);
    if (solve->parsed())
      return cmd_solve(a, L > 0 ? L : 10.0, n > 0 ? n : 401, boundary);
    if (dec->parsed()) return cmd_decouple(a, input);
    if (rearr->parsed()) return cmd_rearrange(a, input, base_axes);
    if (ex->parsed()) return cmd_examples(a, case_name, L, n, signs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
