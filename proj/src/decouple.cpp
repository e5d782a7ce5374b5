#include "otsys/decouple.hpp"

#include <fstream>
#include <iomanip>
#include <limits>

namespace otsys {

DecouplingPotentials build_decoupling(const FieldBundle& field,
                                      const Nonlinearity& spec,
                                      const DecoupleOptions& options) {
  field.validate();
  if (field.m() != spec.m())
    throw std::invalid_argument("build_decoupling: component count != m");
  auto mono = check_monotone(field);
  for (size_t i = 0; i < mono.size(); ++i)
    if (!mono[i].monotone())
      throw std::invalid_argument("build_decoupling: component " +
                                  std::to_string(i + 1) + " is not monotone");

  DecouplingPotentials dec;
  dec.directions = field_directions(field);
  dec.source_residual = system_residual(field, spec);

  std::vector<Vec> vertices(field.mesh.n);
  for (int k = 0; k < field.mesh.n; ++k) vertices[k] = field.at(k);

  PathPotentials::BuildOptions opt;
  opt.refine_density = options.refine_density;
  opt.anchor_vertex = (field.mesh.n - 1) / 2;
  dec.gauge.base_node = opt.anchor_vertex;
  dec.potentials = PathPotentials::build(std::move(vertices), spec, opt);
  dec.gauge.joint_shift = dec.potentials.anchor_discrepancy();
  return dec;
}

double verify_on_solution_identity(const FieldBundle& field,
                                   const DecouplingPotentials& dec,
                                   const Nonlinearity& spec) {
  double gap = 0.0;
  for (int k = 0; k < field.mesh.n; ++k) {
    Vec u = field.at(k);
    gap = std::max(gap, std::abs(dec.potentials.sum_values(u) - spec.H(u)));
  }
  return gap;
}

namespace {

int capped_resolution(int m, int requested) {
  if (requested > 0) return requested;
  double cap = std::pow(1.2e6, 1.0 / m);
  return std::max(2, std::min(33, static_cast<int>(cap)));
}

}  // namespace

GlobalInequalityReport verify_global_inequality(const FieldBundle& field,
                                                const DecouplingPotentials& dec,
                                                const Nonlinearity& spec,
                                                int resolution) {
  auto hv = check_H_monotone(field, spec);
  GlobalInequalityReport rep;
  if (hv.kind == HMonotoneKind::violated)
    throw std::invalid_argument(
        "verify_global_inequality: source field is neither H-monotone nor "
        "(-H)-monotone (witness node " + std::to_string(hv.witness_node) + ")");
  rep.sense = hv.kind == HMonotoneKind::h_monotone ? InequalitySense::less_equal
                                                   : InequalitySense::greater_equal;
  rep.resolution = capped_resolution(spec.m(), resolution);

  const int m = spec.m();
  std::vector<Vec> axes(m);
  for (int i = 0; i < m; ++i) {
    const PotentialTable& t = dec.potentials.table(i);
    if (t.single_point()) {
      axes[i] = {t.lo()};
      continue;
    }
    axes[i].resize(rep.resolution);
    for (int k = 0; k < rep.resolution; ++k)
      axes[i][k] = t.lo() + (t.hi() - t.lo()) * k / (rep.resolution - 1);
  }
  std::vector<size_t> idx(m, 0);
  Vec p(m);
  double worst = -std::numeric_limits<double>::infinity();
  for (;;) {
    for (int i = 0; i < m; ++i) p[i] = axes[i][idx[i]];
    double d = dec.potentials.sum_values(p) - spec.H(p);
    if (rep.sense == InequalitySense::greater_equal) d = -d;
    worst = std::max(worst, d);
    int d2 = m - 1;
    while (d2 >= 0 && ++idx[d2] == axes[d2].size()) idx[d2--] = 0;
    if (d2 < 0) break;
  }
  rep.max_violation = worst;
  return rep;
}

double verify_decoupled_pde(const FieldBundle& field,
                            const DecouplingPotentials& dec) {
  const int n = field.mesh.n;
  const double h2 = field.mesh.h() * field.mesh.h();
  double worst = 0.0;
  for (int k = 1; k < n - 1; ++k)
    for (int i = 0; i < field.m(); ++i) {
      double lap = (field.components[i][k + 1] - 2.0 * field.components[i][k] +
                    field.components[i][k - 1]) / h2;
      worst = std::max(worst, std::abs(lap - dec.deriv(i, field.components[i][k])));
    }
  return worst;
}

namespace {

// Nodal derivative by finite differences: fourth order inside, second order
// near and at the ends.
Vec fd_derivative(const Vec& u, double h) {
  const int n = static_cast<int>(u.size());
  Vec d(n);
  d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
  d[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
  if (n > 2) {
    d[1] = (u[2] - u[0]) / (2.0 * h);
    d[n - 2] = (u[n - 1] - u[n - 3]) / (2.0 * h);
  }
  for (int k = 2; k + 2 < n; ++k)
    d[k] = (-u[k + 2] + 8.0 * u[k + 1] - 8.0 * u[k - 1] + u[k - 2]) / (12.0 * h);
  return d;
}

}  // namespace

ModicaReport modica_check(const FieldBundle& field,
                          const DecouplingPotentials& dec,
                          const Nonlinearity& spec,
                          const std::optional<std::vector<Vec>>& derivatives,
                          double eps) {
  const int n = field.mesh.n;
  const int m = field.m();
  ModicaReport rep;

  std::vector<Vec> du;
  if (derivatives) {
    if (static_cast<int>(derivatives->size()) != m)
      throw std::invalid_argument("modica_check: derivative count != m");
    du = *derivatives;
  } else {
    const double h = field.mesh.h();
    for (const Vec& u : field.components) {
      du.push_back(fd_derivative(u, h));
      // noise floor of the differenced gradient term, ~|u'| h^2 |u'''| / 6
      const Vec& d = du.back();
      Vec d2 = fd_derivative(d, h);
      Vec d3 = fd_derivative(d2, h);
      rep.fd_margin += max_abs(d) * h * h * max_abs(d3) / 6.0;
    }
  }

  rep.v_min.resize(m);
  double vbar_sum = 0.0;
  double table_variation = 0.0;
  for (int i = 0; i < m; ++i) {
    const PotentialTable& t = dec.potentials.table(i);
    rep.v_min[i] = t.min_value();
    vbar_sum += rep.v_min[i];
    table_variation = std::max(
        table_variation,
        *std::max_element(t.values.begin(), t.values.end()) - rep.v_min[i]);
  }

  rep.lhs.resize(n);
  rep.rhs.resize(n);
  double viol = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    double g2 = 0.0;
    for (int i = 0; i < m; ++i) g2 += du[i][k] * du[i][k];
    rep.lhs[k] = 0.5 * g2;
    rep.rhs[k] = spec.H(field.at(k)) - vbar_sum;
    viol = std::max(viol, rep.lhs[k] - rep.rhs[k]);
  }
  rep.max_violation = viol;

  // 1D refinement: 1/2 sum g_i'^2 = sum V_i(g_i) - sum C_i with
  // C_i = V_i(right-endpoint value), and sum C_i = H(right-endpoint tuple).
  rep.C.resize(m);
  double c_sum = 0.0;
  for (int i = 0; i < m; ++i) {
    rep.C[i] = dec.value(i, field.components[i][n - 1]);
    c_sum += rep.C[i];
  }
  double fi_gap = 0.0;
  for (int k = 0; k < n; ++k)
    fi_gap = std::max(
        fi_gap, std::abs(rep.lhs[k] -
                         (dec.potentials.sum_values(field.at(k)) - c_sum)));
  rep.first_integral_gap = fi_gap;
  rep.limit_identity_gap = std::abs(c_sum - spec.H(field.at(n - 1)));

  // When H >= 0 on the range product, also check the potential-free bound.
  {
    const int res = capped_resolution(m, 0) / 2 + 1;
    std::vector<Vec> axes(m);
    for (int i = 0; i < m; ++i) {
      const PotentialTable& t = dec.potentials.table(i);
      if (t.single_point()) {
        axes[i] = {t.lo()};
        continue;
      }
      axes[i].resize(res);
      for (int k = 0; k < res; ++k)
        axes[i][k] = t.lo() + (t.hi() - t.lo()) * k / (res - 1);
    }
    std::vector<size_t> idx(m, 0);
    Vec p(m);
    double hmin = std::numeric_limits<double>::infinity();
    for (;;) {
      for (int i = 0; i < m; ++i) p[i] = axes[i][idx[i]];
      hmin = std::min(hmin, spec.H(p));
      int d = m - 1;
      while (d >= 0 && ++idx[d] == axes[d].size()) idx[d--] = 0;
      if (d < 0) break;
    }
    rep.H_nonnegative_on_range = hmin >= -eps;
    if (rep.H_nonnegative_on_range) {
      double v = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < n; ++k)
        v = std::max(v, rep.lhs[k] - spec.H(field.at(k)));
      rep.nonneg_modica_violation = v;
    }
  }

  // The estimate is asserted only for (approximate) solutions of a system
  // with a non-degenerate potential; otherwise raw values are reported.
  // The pass margin absorbs the finite-difference noise floor.
  rep.applicable = dec.source_residual <= 1e-2 && table_variation > 1e-12;
  if (rep.applicable) rep.pass = rep.max_violation <= eps + rep.fd_margin;
  return rep;
}

void write_potentials_csv_file(const std::string& path_prefix,
                               const DecouplingPotentials& dec,
                               size_t max_rows_per_component) {
  for (int i = 0; i < dec.potentials.m(); ++i) {
    const PotentialTable& t = dec.potentials.table(i);
    std::ofstream out(path_prefix + "_V" + std::to_string(i + 1) + ".csv");
    if (!out)
      throw std::runtime_error("cannot write potentials csv: " + path_prefix);
    out << "p,V,Vprime\n" << std::setprecision(17);
    size_t stride = std::max<size_t>(1, t.knots.size() / max_rows_per_component);
    for (size_t k = 0; k < t.knots.size(); k += stride)
      out << t.knots[k] << "," << t.values[k] << "," << t.derivs[k] << "\n";
    if ((t.knots.size() - 1) % stride != 0)
      out << t.knots.back() << "," << t.values.back() << ","
          << t.derivs.back() << "\n";
  }
}

}  // namespace otsys
