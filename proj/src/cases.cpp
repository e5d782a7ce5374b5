#include "otsys/cases.hpp"

#include <filesystem>
#include <limits>
#include <numeric>

#include "otsys/mmot.hpp"

namespace otsys {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

void dump_field(const std::string& out_dir, const std::string& name,
                const FieldBundle& field, Report& rep) {
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  std::string path = out_dir + "/" + name;
  write_field_csv_file(path, field);
  rep.outputs[name] = path;
}

void dump_potentials(const std::string& out_dir, const std::string& prefix,
                     const DecouplingPotentials& dec, Report& rep) {
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  std::string path = out_dir + "/" + prefix;
  write_potentials_csv_file(path, dec);
  for (int i = 0; i < dec.potentials.m(); ++i) {
    std::string name = prefix + "_V" + std::to_string(i + 1) + ".csv";
    rep.outputs[name] = path + "_V" + std::to_string(i + 1) + ".csv";
  }
}

}  // namespace

FieldBundle ac_exact_field(int m, const Mesh1D& mesh) {
  FieldBundle f;
  f.mesh = mesh;
  Vec u(mesh.n);
  for (int k = 0; k < mesh.n; ++k) u[k] = std::tanh(mesh.node(k) / kSqrt2);
  for (int i = 0; i < m; ++i) f.components.push_back(u);
  for (int i = 0; i < m; ++i) f.boundary.emplace_back(u.front(), u.back());
  return f;
}

std::vector<Vec> ac_exact_derivatives(int m, const Mesh1D& mesh) {
  Vec d(mesh.n);
  for (int k = 0; k < mesh.n; ++k) {
    double c = std::cosh(mesh.node(k) / kSqrt2);
    d[k] = 1.0 / (kSqrt2 * c * c);
  }
  return std::vector<Vec>(m, d);
}

FieldBundle trim_to_monotone_core(const FieldBundle& field, int safety_nodes) {
  const int n = field.mesh.n;
  int lo = 0, hi = n - 1;
  for (const Vec& u : field.components) {
    int dir = u[n - 1] > u[0] ? 1 : -1;
    // wrong-signed forward differences confined to the truncation ends
    int last_bad_left = -1;
    for (int k = 0; k + 1 < n / 2; ++k)
      if (dir * (u[k + 1] - u[k]) <= 0.0) last_bad_left = k;
    int first_bad_right = n;
    for (int k = n - 2; k >= n / 2; --k)
      if (dir * (u[k + 1] - u[k]) <= 0.0) first_bad_right = k;
    lo = std::max(lo, last_bad_left + 1);
    hi = std::min(hi, first_bad_right);
  }
  lo = std::min(lo + safety_nodes, n - 1);
  hi = std::max(hi - safety_nodes, 0);
  if (hi - lo + 1 < 3)
    throw std::runtime_error(
        "trim_to_monotone_core: no monotone core of usable size");
  return field.restrict_nodes(lo, hi);
}

double common_level_set_defect(const FieldBundle& field) {
  const int n = field.mesh.n;
  const int m = field.m();
  double defect = 0.0;
  std::vector<int> order(n);
  for (int i = 0; i < m; ++i) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return field.components[i][a] < field.components[i][b];
    });
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      // u_j visited in u_i order must be monotone (either direction)
      double up = 0.0, down = 0.0;
      for (int k = 0; k + 1 < n; ++k) {
        double d = field.components[j][order[k + 1]] -
                   field.components[j][order[k]];
        if (d < 0) up = std::max(up, -d);
        if (d > 0) down = std::max(down, d);
      }
      defect = std::max(defect, std::min(up, down));
    }
  }
  return defect;
}

Report run_ac_quadratic(int m, double L, int n, const std::string& out_dir) {
  Report rep;
  rep.command = "examples/ac-quadratic";
  rep.params = {{"m", m}, {"L", L}, {"n", n}};
  Nonlinearity spec = make_spec("ac-quadratic", m);
  Mesh1D mesh(-L, L, n);

  // (a) orientability with theta = (1, ..., 1)
  SampleGrid grid = SampleGrid::standard(spec.domain());
  auto orient = check_orientable(spec, grid);
  bool theta_ones = orient.orientable();
  if (theta_ones)
    for (int t : orient.theta->theta) theta_ones = theta_ones && t == 1;
  rep.add("orientable-theta-ones", theta_ones, orient.orientable() ? 1.0 : 0.0);

  // (b) the exact tanh profile solves the coupled system to O(h^2)
  FieldBundle exact = ac_exact_field(m, mesh);
  double res_exact = system_residual(exact, spec);
  double scale = std::pow(400.0 / (n - 1) * (L / 10.0), 2.0);
  rep.add("exact-profile-residual", res_exact <= 4e-4 * scale, res_exact,
          4e-4 * scale);

  // numeric solve of the coupled system
  std::vector<std::pair<double, double>> bc(
      m, {std::tanh(-L / kSqrt2), std::tanh(L / kSqrt2)});
  auto [field, solve_rep] =
      solve_system_bvp(spec, mesh, bc, FieldBundle::ramp(mesh, bc));
  rep.add("bvp-converged", solve_rep.converged, solve_rep.final_residual,
          tol::newton);
  dump_field(out_dir, "ac_quadratic_profile.csv", field, rep);

  // (c) decoupling recovers the scalar double well
  DecouplingPotentials dec = build_decoupling(field, spec);
  double wp_gap = 0.0;
  for (int i = 0; i < m; ++i) {
    const PotentialTable& t = dec.table(i);
    for (size_t k = 0; k < t.knots.size(); ++k)
      wp_gap = std::max(wp_gap,
                        std::abs(t.derivs[k] - allen_cahn_Wp(t.knots[k])));
  }
  rep.add("decoupling-recovers-well", wp_gap <= 1e-8, wp_gap, 1e-8);
  dump_potentials(out_dir, "ac_quadratic", dec, rep);

  // (d)-(e) on-solution identity and the global inequality
  double identity_gap = verify_on_solution_identity(field, dec, spec);
  rep.add("on-solution-identity", identity_gap <= 1e-8, identity_gap, 1e-8);
  auto global = verify_global_inequality(field, dec, spec);
  rep.add("global-inequality", global.max_violation <= 1e-8,
          global.max_violation, 1e-8);

  double dec_res = verify_decoupled_pde(field, dec);
  double dec_tol = std::max(tol::decouple, 10.0 * solve_rep.final_residual);
  rep.add("decoupled-residual", dec_res <= dec_tol, dec_res, dec_tol);

  // (e) Modica equality along the exact profile, analytic derivatives
  DecouplingPotentials dec_exact = build_decoupling(exact, spec);
  ModicaReport modica =
      modica_check(exact, dec_exact, spec, ac_exact_derivatives(m, mesh));
  double modica_eq = 0.0;
  for (int k = 0; k < mesh.n; ++k)
    modica_eq = std::max(modica_eq,
                         std::abs(modica.lhs[k] - spec.H(exact.at(k))));
  rep.add("modica-equality", modica_eq <= 1e-8, modica_eq, 1e-8);
  rep.add("modica-estimate",
          modica.applicable && modica.pass.value_or(false),
          modica.max_violation, tol::decouple);

  // (f) pushforward coupling matches the quantile coupling and certifies
  auto push = verify_pushforward_optimality(field, spec, Orientation::ones(m));
  rep.add("pushforward-coincides", push.coincides, push.support_distance,
          1e-10);
  rep.add("pushforward-certificate", push.certificate.pass(),
          std::max(push.certificate.max_feasibility_violation,
                   push.certificate.max_support_gap),
          tol::dual);

  double cls = common_level_set_defect(field);
  rep.add("common-level-sets", cls <= 1e-10, cls, 1e-10);
  return rep;
}

Report run_ac_logsumexp(int m, const std::vector<int>& signs, double L, int n,
                        const std::string& out_dir) {
  if (static_cast<int>(signs.size()) != m)
    throw std::invalid_argument("run_ac_logsumexp: sign pattern length != m");
  for (int s : signs)
    if (s != 1 && s != -1)
      throw std::invalid_argument("run_ac_logsumexp: signs must be +-1");

  Report rep;
  rep.command = "examples/ac-logsumexp";
  std::string sig;
  for (int s : signs) sig += s > 0 ? '+' : '-';
  rep.params = {{"m", m}, {"L", L}, {"n", n}, {"signs", sig}};

  // Verification window per component: the sign-matched box away from 0.
  Box window(m);
  for (int i = 0; i < m; ++i)
    window[i] = signs[i] > 0 ? Interval{0.05, 0.95} : Interval{-0.95, -0.05};
  Nonlinearity spec = make_spec("ac-logsumexp", m).with_domain(window);

  // (a) region-restricted orientability; theta matches the sign pattern
  SampleGrid grid = SampleGrid::standard(window);
  auto orient = check_orientable(spec, grid);
  bool theta_ok = orient.orientable();
  if (theta_ok)
    for (int i = 0; i < m; ++i)
      theta_ok = theta_ok && orient.theta->theta[i] == signs[i] * signs[0];
  rep.add("orientable-on-window", theta_ok, orient.orientable() ? 1.0 : 0.0);

  // (b) signed tanh profiles solve the coupled system to O(h^2)
  Mesh1D mesh(-L, L, n);
  FieldBundle exact = ac_exact_field(m, mesh);
  for (int i = 0; i < m; ++i)
    if (signs[i] < 0) {
      for (double& v : exact.components[i]) v = -v;
      exact.boundary[i] = {exact.components[i].front(),
                           exact.components[i].back()};
    }
  // residual needs H on the profile's full range
  Nonlinearity wide = make_spec("ac-logsumexp", m)
                          .with_domain(Box(m, Interval{-1.0, 1.0}));
  double res_exact = system_residual(exact, wide);
  double scale = std::pow(400.0 / (n - 1) * (L / 10.0), 2.0);
  rep.add("exact-profile-residual", res_exact <= 4e-4 * scale, res_exact,
          4e-4 * scale);

  // (c) sum_i W(u_i) <= H on the window grid, equality when u_i^2 all equal
  double worst = -std::numeric_limits<double>::infinity();
  for (const Vec& p : grid.points) {
    double sw = 0.0;
    for (double x : p) sw += allen_cahn_W(x);
    worst = std::max(worst, sw - spec.H(p));
  }
  rep.add("amgm-inequality", worst <= 1e-12, worst, 1e-12);

  double locus_gap = 0.0;
  for (int k = 0; k <= 32; ++k) {
    double t = 0.05 + (0.95 - 0.05) * k / 32.0;
    Vec p(m);
    for (int i = 0; i < m; ++i) p[i] = signs[i] * t;
    double sw = 0.0;
    for (double x : p) sw += allen_cahn_W(x);
    locus_gap = std::max(locus_gap, std::abs(spec.H(p) - sw));
  }
  rep.add("amgm-equality-locus", locus_gap <= 1e-12, locus_gap, 1e-12);

  // (d) decoupled recovery on the monotone window x >= x_cut where every
  // |u_i| >= 0.1 (orientability fails at u_i = 0).
  int k_lo = n / 2;
  while (k_lo < n - 3 && std::tanh(mesh.node(k_lo) / kSqrt2) < 0.1) ++k_lo;
  FieldBundle windowed = exact.restrict_nodes(k_lo, n - 1);
  auto hv = check_H_monotone(windowed, wide);
  rep.add("window-H-monotone", hv.h_monotone(), hv.h_monotone() ? 1.0 : 0.0);

  DecouplingPotentials dec = build_decoupling(windowed, wide);
  double wp_gap = 0.0;
  for (int i = 0; i < m; ++i) {
    const PotentialTable& t = dec.table(i);
    for (size_t k = 0; k < t.knots.size(); ++k)
      wp_gap = std::max(wp_gap,
                        std::abs(t.derivs[k] - allen_cahn_Wp(t.knots[k])));
  }
  rep.add("decoupled-recovery", wp_gap <= 1e-8, wp_gap, 1e-8);

  double identity_gap = verify_on_solution_identity(windowed, dec, wide);
  rep.add("window-identity", identity_gap <= 1e-8, identity_gap, 1e-8);

  dump_field(out_dir, "ac_logsumexp_profile.csv", exact, rep);
  dump_potentials(out_dir, "ac_logsumexp", dec, rep);
  return rep;
}

Report run_quadratic_coupling(double L, int n, std::pair<double, double> bc1,
                              std::pair<double, double> bc2,
                              const std::string& out_dir) {
  Report rep;
  rep.command = "examples/quadratic-coupling";
  rep.params = {{"L", L},
                {"n", n},
                {"bc1", {bc1.first, bc1.second}},
                {"bc2", {bc2.first, bc2.second}}};
  if (!(bc1.first > 0 && bc1.second > 0 && bc2.first > 0 && bc2.second > 0))
    throw std::invalid_argument("run_quadratic_coupling: boundary must be positive");

  double hi = std::max({bc1.first, bc1.second, bc2.first, bc2.second});
  Box box = {Interval{0.0, 1.5 * hi}, Interval{0.0, 1.5 * hi}};
  Nonlinearity spec = make_spec("quadratic-coupling").with_domain(box);
  Mesh1D mesh(-L, L, n);

  auto [field, solve_rep] = solve_system_bvp(spec, mesh, {bc1, bc2});
  rep.add("bvp-converged", solve_rep.converged, solve_rep.final_residual,
          tol::newton);
  dump_field(out_dir, "quadratic_coupling_profile.csv", field, rep);

  double umin = std::numeric_limits<double>::infinity();
  for (const Vec& c : field.components)
    for (double v : c) umin = std::min(umin, v);
  rep.add("positivity", umin > 0.0, umin, std::nullopt,
          "min over nodes and components");

  // Truncated Dirichlet data forces a small sag where the natural profile
  // decays below the pinned value; the monotone analysis runs on the core.
  FieldBundle core = trim_to_monotone_core(field);
  rep.params["core"] = {core.mesh.lo, core.mesh.hi};
  auto mono = check_monotone(core);
  bool mono_ok = mono[0].kind == Monotonicity::increasing &&
                 mono[1].kind == Monotonicity::decreasing;
  rep.add("core-monotone", mono_ok, mono_ok ? 1.0 : 0.0,
          std::nullopt, "u1 increasing, u2 decreasing");

  auto hv = check_H_monotone(core, spec);
  rep.add("core-H-monotone", hv.h_monotone(), hv.h_monotone() ? 1.0 : 0.0);

  DecouplingPotentials dec = build_decoupling(core, spec);
  dump_potentials(out_dir, "quadratic_coupling", dec, rep);

  // Explicit integrals V_1(t) = int_0^t s u2^2(u1^{-1}(s)) ds (and the
  // mirror image), evaluated by fine trapezoid quadrature on the same
  // piecewise-linear profile, compared up to an additive constant.
  double oracle_gap = 0.0;
  for (int comp = 0; comp < 2; ++comp) {
    const Vec& self = core.components[comp];
    const Vec& other = core.components[1 - comp];
    Vec s_grid = self, o_grid = other;
    if (s_grid.front() > s_grid.back()) {
      std::reverse(s_grid.begin(), s_grid.end());
      std::reverse(o_grid.begin(), o_grid.end());
    }
    const int fine = 1 << 17;
    double lo2 = s_grid.front(), hi2 = s_grid.back();
    double acc = 0.0, prev_g = lo2 * std::pow(pl_interp(s_grid, o_grid, lo2), 2);
    Vec fs(fine + 1), fv(fine + 1);
    fs[0] = lo2;
    fv[0] = 0.0;
    for (int k = 1; k <= fine; ++k) {
      double s = lo2 + (hi2 - lo2) * k / fine;
      double g = s * std::pow(pl_interp(s_grid, o_grid, s), 2);
      acc += 0.5 * (prev_g + g) * (hi2 - lo2) / fine;
      prev_g = g;
      fs[k] = s;
      fv[k] = acc;
    }
    // align at the lowest knot and compare on the nodal values
    const PotentialTable& t = dec.table(comp);
    double shift = t.value(fs[0]) - 0.0;
    for (double p : self) {
      double mine = t.value(p) - shift;
      double oracle = pl_interp(fs, fv, p);
      oracle_gap = std::max(oracle_gap, std::abs(mine - oracle));
    }
  }
  rep.add("potentials-vs-explicit-integrals", oracle_gap <= 1e-6, oracle_gap,
          1e-6);

  // F_i(q) = 2 V_i(sqrt q): concavity via raw second differences on a
  // uniform q-grid (quadrature evaluation, below the interpolation floor).
  double second_diff = -std::numeric_limits<double>::infinity();
  for (int comp = 0; comp < 2; ++comp) {
    const PotentialTable& t = dec.table(comp);
    double qlo = t.lo() * t.lo(), qhi = t.hi() * t.hi();
    const int nq = 513;
    Vec F(nq);
    for (int k = 0; k < nq; ++k) {
      double q = qlo + (qhi - qlo) * k / (nq - 1);
      F[k] = 2.0 * dec.potentials.value_exact(comp, std::sqrt(q));
    }
    for (int k = 1; k + 1 < nq; ++k)
      second_diff = std::max(second_diff, F[k + 1] - 2.0 * F[k] + F[k - 1]);
  }
  rep.add("F-concavity", second_diff <= 1e-10, second_diff, 1e-10);

  // Legendre conjugacy on the covered range:
  // F_1(q1) = min_{q2} (q1 q2 - F_2(q2)) up to range truncation.
  double conj_gap = 0.0;
  {
    const PotentialTable& t1 = dec.table(0);
    const PotentialTable& t2 = dec.table(1);
    const int ng = 257;
    Vec q2(ng), F2(ng);
    for (int k = 0; k < ng; ++k) {
      double p2 = t2.lo() + (t2.hi() - t2.lo()) * k / (ng - 1);
      q2[k] = p2 * p2;
      F2[k] = 2.0 * dec.potentials.value_exact(1, p2);
    }
    for (int k = 0; k < ng; ++k) {
      double p1 = t1.lo() + (t1.hi() - t1.lo()) * k / (ng - 1);
      double q1 = p1 * p1;
      double F1 = 2.0 * dec.potentials.value_exact(0, p1);
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < ng; ++j) best = std::min(best, q1 * q2[j] - F2[j]);
      conj_gap = std::max(conj_gap, std::abs(F1 - best));
    }
  }
  rep.add("legendre-conjugacy", conj_gap <= tol::conj, conj_gap, tol::conj);

  // Saturation F_1(u1^2) + F_2(u2^2) = u1^2 u2^2 along the solution.
  double sat = 0.0;
  for (int k = 0; k < core.mesh.n; ++k) {
    double u1 = core.components[0][k], u2 = core.components[1][k];
    double lhs = 2.0 * dec.value(0, u1) + 2.0 * dec.value(1, u2);
    sat = std::max(sat, std::abs(lhs - u1 * u1 * u2 * u2));
  }
  rep.add("saturation", sat <= 1e-6, sat, 1e-6);

  // Decoupled scalar solves reproduce the components.
  double reproduce = 0.0;
  for (int comp = 0; comp < 2; ++comp) {
    auto Vp = [&dec, comp](double p) { return dec.deriv(comp, p); };
    auto [u, srep] = solve_scalar_bvp(Vp, core.mesh, core.boundary[comp]);
    if (!srep.converged) {
      reproduce = std::numeric_limits<double>::infinity();
      break;
    }
    for (int k = 0; k < core.mesh.n; ++k)
      reproduce = std::max(reproduce,
                           std::abs(u[k] - core.components[comp][k]));
  }
  rep.add("decoupled-solves-reproduce", reproduce <= 1e-4, reproduce, 1e-4);

  auto global = verify_global_inequality(core, dec, spec);
  bool sense_le = global.sense == InequalitySense::less_equal;
  rep.add("global-inequality", sense_le && global.max_violation <= tol::decouple,
          global.max_violation, tol::decouple);

  ModicaReport modica = modica_check(core, dec, spec);
  rep.add("modica-estimate", modica.applicable && modica.pass.value_or(false),
          modica.max_violation, tol::decouple,
          "fd margin " + std::to_string(modica.fd_margin));

  // Proposition bridge: pushforward = quantile coupling, certificate passes.
  auto push = verify_pushforward_optimality(core, spec, field_directions(core));
  rep.add("pushforward-coincides", push.coincides, push.support_distance, 1e-10);
  rep.add("pushforward-certificate", push.certificate.pass(),
          std::max(push.certificate.max_feasibility_violation,
                   push.certificate.max_support_gap),
          tol::dual);

  double cls = common_level_set_defect(core);
  rep.add("common-level-sets", cls <= 1e-10, cls, 1e-10);
  return rep;
}

}  // namespace otsys
