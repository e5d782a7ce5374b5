#include "otsys/rearrange.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

namespace otsys {

long long BoxGrid::base_points() const {
  long long p = 1;
  for (const auto& ax : base) p *= ax.n;
  return p;
}

double BoxGrid::base_volume() const {
  double v = 1.0;
  for (const auto& ax : base) v *= ax.hi - ax.lo;
  return v;
}

double BoxGrid::base_weight(long long b) const {
  double w = 1.0;
  long long rest = b;
  for (int d = base_axes() - 1; d >= 0; --d) {
    int idx = static_cast<int>(rest % base[d].n);
    rest /= base[d].n;
    w *= trapezoid_weight(idx, base[d].n, base[d].h());
  }
  return w;
}

Vec BoxGrid::base_point(long long b) const {
  Vec p(base_axes());
  long long rest = b;
  for (int d = base_axes() - 1; d >= 0; --d) {
    int idx = static_cast<int>(rest % base[d].n);
    rest /= base[d].n;
    p[d] = base[d].node(idx);
  }
  return p;
}

void BoxField::validate(double boundary_tol, double eps_mono) const {
  if (grid.base_axes() < 1 || grid.base_axes() > 2)
    throw std::invalid_argument("BoxField: Omega must have 1 or 2 axes");
  if (std::abs(grid.vertical.lo) > 1e-12 ||
      std::abs(grid.vertical.hi - 1.0) > 1e-12)
    throw std::invalid_argument("BoxField: vertical axis must span [0,1]");
  if (components.empty() || boundary.size() != components.size())
    throw std::invalid_argument("BoxField: bad component/boundary shape");
  const long long nb = grid.base_points();
  const int nv = grid.vertical.n;
  for (const Vec& c : components)
    if (static_cast<long long>(c.size()) != nb * nv)
      throw std::invalid_argument("BoxField: component size mismatch");

  for (int i = 0; i < m(); ++i) {
    const auto& [a, bb] = boundary[i];
    if (a == bb)
      throw std::invalid_argument("BoxField: degenerate vertical range a_i = b_i");
    int dir = bb > a ? 1 : -1;
    for (long long b = 0; b < nb; ++b) {
      if (std::abs(at(i, b, 0) - a) > boundary_tol ||
          std::abs(at(i, b, nv - 1) - bb) > boundary_tol)
        throw std::invalid_argument(
            "BoxField: boundary slice not constant in x'");
      for (int l = 0; l + 1 < nv; ++l) {
        double d = dir * (at(i, b, l + 1) - at(i, b, l));
        bool edge = (l == 0) || (l + 2 == nv);
        if (edge ? d < -eps_mono : d <= eps_mono)
          throw std::invalid_argument(
              "BoxField: component " + std::to_string(i + 1) +
              " not strictly monotone along a vertical line");
      }
    }
  }
}

EnergyBreakdown energy(const BoxField& field, const Nonlinearity& spec) {
  const BoxGrid& g = field.grid;
  const long long nb = g.base_points();
  const int nv = g.vertical.n;
  const double hv = g.vertical.h();

  EnergyBreakdown e;
  // Potential term: nodal trapezoid weights.
  for (long long b = 0; b < nb; ++b) {
    double wb = g.base_weight(b);
    Vec u(field.m());
    for (int l = 0; l < nv; ++l) {
      for (int i = 0; i < field.m(); ++i) u[i] = field.at(i, b, l);
      e.potential += wb * trapezoid_weight(l, nv, hv) * spec.H(u);
    }
  }
  // Vertical edges.
  double dir = 0.0;
  for (int i = 0; i < field.m(); ++i)
    for (long long b = 0; b < nb; ++b) {
      double wb = g.base_weight(b);
      for (int l = 0; l + 1 < nv; ++l) {
        double d = (field.at(i, b, l + 1) - field.at(i, b, l)) / hv;
        dir += wb * hv * d * d;
      }
    }
  // Base-axis edges.
  if (g.base_axes() == 1) {
    const Mesh1D& ax = g.base[0];
    for (int i = 0; i < field.m(); ++i)
      for (int a = 0; a + 1 < ax.n; ++a)
        for (int l = 0; l < nv; ++l) {
          double d = (field.at(i, a + 1, l) - field.at(i, a, l)) / ax.h();
          dir += ax.h() * trapezoid_weight(l, nv, hv) * d * d;
        }
  } else {
    const Mesh1D& a0 = g.base[0];
    const Mesh1D& a1 = g.base[1];
    for (int i = 0; i < field.m(); ++i) {
      for (int a = 0; a + 1 < a0.n; ++a)
        for (int c = 0; c < a1.n; ++c)
          for (int l = 0; l < nv; ++l) {
            long long b0 = static_cast<long long>(a) * a1.n + c;
            long long b1 = static_cast<long long>(a + 1) * a1.n + c;
            double d = (field.at(i, b1, l) - field.at(i, b0, l)) / a0.h();
            dir += a0.h() * trapezoid_weight(c, a1.n, a1.h()) *
                   trapezoid_weight(l, nv, hv) * d * d;
          }
      for (int a = 0; a < a0.n; ++a)
        for (int c = 0; c + 1 < a1.n; ++c)
          for (int l = 0; l < nv; ++l) {
            long long b0 = static_cast<long long>(a) * a1.n + c;
            long long b1 = static_cast<long long>(a) * a1.n + c + 1;
            double d = (field.at(i, b1, l) - field.at(i, b0, l)) / a1.h();
            dir += a1.h() * trapezoid_weight(a, a0.n, a0.h()) *
                   trapezoid_weight(l, nv, hv) * d * d;
          }
    }
  }
  e.dirichlet = 0.5 * dir;
  e.total = e.dirichlet + e.potential;
  return e;
}

EnergyBreakdown energy_lifted(const FieldBundle& profile,
                              const Nonlinearity& spec, double base_volume) {
  const int nv = profile.mesh.n;
  const double hv = profile.mesh.h();
  EnergyBreakdown e;
  double dir = 0.0;
  for (int l = 0; l < nv; ++l)
    e.potential += trapezoid_weight(l, nv, hv) * spec.H(profile.at(l));
  for (const Vec& u : profile.components)
    for (int l = 0; l + 1 < nv; ++l) {
      double d = (u[l + 1] - u[l]) / hv;
      dir += hv * d * d;
    }
  e.potential *= base_volume;
  e.dirichlet = 0.5 * dir * base_volume;
  e.total = e.dirichlet + e.potential;
  return e;
}

RearrangedField rectangular_rearrangement(const BoxField& field,
                                          const Nonlinearity& spec) {
  field.validate();
  if (field.m() != spec.m())
    throw std::invalid_argument("rectangular_rearrangement: m mismatch");
  const BoxGrid& g = field.grid;
  const long long nb = g.base_points();
  const int nv = g.vertical.n;
  const double hv = g.vertical.h();
  const double vol = g.base_volume();  // vertical extent is 1

  RearrangedField out;
  for (int i = 0; i < field.m(); ++i)
    out.directions.theta.push_back(
        field.boundary[i].second > field.boundary[i].first ? 1 : -1);

  // Boundary consistency with the orientability condition, checked on the
  // field's own values.
  out.consistency_ok = true;
  Vec u(field.m());
  for (long long b = 0; b < nb && out.consistency_ok; ++b)
    for (int l = 0; l < nv && out.consistency_ok; ++l) {
      for (int i = 0; i < field.m(); ++i) u[i] = field.at(i, b, l);
      SquareMat h = spec.hess(u);
      for (int i = 0; i < field.m() && out.consistency_ok; ++i)
        for (int j = i + 1; j < field.m(); ++j) {
          double v = h.at(i, j) *
                     (field.boundary[i].second - field.boundary[i].first) *
                     (field.boundary[j].second - field.boundary[j].first);
          if (!(v < 0.0)) {
            out.consistency_ok = false;
            out.consistency_witness = Witness{u, {i, j}, v};
            break;
          }
        }
    }

  // Pushforward marginals under the normalized quadrature measure.
  Vec weights(static_cast<size_t>(nb) * nv);
  for (long long b = 0; b < nb; ++b) {
    double wb = g.base_weight(b) / vol;
    for (int l = 0; l < nv; ++l)
      weights[static_cast<size_t>(g.index(b, l))] =
          wb * trapezoid_weight(l, nv, hv);
  }
  for (int i = 0; i < field.m(); ++i)
    out.marginals.push_back(
        DiscreteMarginal::from_samples(field.components[i], weights));

  // Quantile profile at the cumulative vertical levels T_l, upper-tail form
  // for decreasing components.
  Vec levels(nv);
  {
    double acc = 0.0;
    for (int l = 0; l < nv; ++l) {
      acc += trapezoid_weight(l, nv, hv);
      levels[l] = std::min(acc, 1.0);
    }
    levels[nv - 1] = 1.0;
  }
  out.profile.mesh = g.vertical;
  for (int i = 0; i < field.m(); ++i) {
    Vec prof(nv);
    if (out.directions.theta[i] == 1) {
      for (int l = 0; l < nv; ++l) prof[l] = out.marginals[i].quantile(levels[l]);
    } else {
      DiscreteMarginal neg = out.marginals[i].negated();
      for (int l = 0; l < nv; ++l) prof[l] = -neg.quantile(levels[l]);
    }
    out.profile.components.push_back(std::move(prof));
  }
  for (const Vec& c : out.profile.components)
    out.profile.boundary.emplace_back(c.front(), c.back());

  out.slices = solve_monotone(out.marginals, out.directions);
  return out;
}

EnergyDecreaseReport verify_energy_decrease(const BoxField& field,
                                            const Nonlinearity& spec,
                                            double eps) {
  EnergyDecreaseReport rep;
  rep.before = energy(field, spec);

  rep.rearranged = rectangular_rearrangement(field, spec);
  const RearrangedField& r = rep.rearranged;
  rep.consistency_ok = r.consistency_ok;

  const double vol = field.grid.base_volume();
  // Dirichlet term of the lifted 1D profile; potential term through the
  // exact quantile slices (the coupling cost under the same measure).
  EnergyBreakdown after = energy_lifted(r.profile, spec, vol);
  after.potential = vol * coupling_cost(r.slices, spec);
  after.total = after.dirichlet + after.potential;
  rep.after = after;

  rep.dirichlet_decrease = rep.before.dirichlet - rep.after.dirichlet;
  rep.potential_decrease = rep.before.potential - rep.after.potential;
  bool dir_ok = rep.after.dirichlet <= rep.before.dirichlet + eps;
  bool pot_ok = !rep.consistency_ok ||
                rep.after.potential <= rep.before.potential + eps;
  rep.pass = dir_ok && pot_ok;
  return rep;
}

std::pair<double, double> hl_sums(const std::vector<Vec>& vectors,
                                  const Nonlinearity& spec) {
  const int m = static_cast<int>(vectors.size());
  if (m != spec.m())
    throw std::invalid_argument("hl_sums: vector count != m");
  const size_t K = vectors[0].size();
  for (const Vec& v : vectors)
    if (v.size() != K)
      throw std::invalid_argument("hl_sums: vectors must share a length");

  std::vector<Vec> sorted = vectors;
  for (Vec& v : sorted) std::sort(v.begin(), v.end(), std::greater<double>());

  double s_sorted = 0.0, s_orig = 0.0;
  Vec tuple(m);
  for (size_t k = 0; k < K; ++k) {
    for (int i = 0; i < m; ++i) tuple[i] = sorted[i][k];
    s_sorted += spec.H(tuple);
    for (int i = 0; i < m; ++i) tuple[i] = vectors[i][k];
    s_orig += spec.H(tuple);
  }
  return {s_sorted, s_orig};
}

HLReport hl_inequality_check(const std::vector<Vec>& vectors,
                             const Nonlinearity& spec, double eps) {
  const int m = static_cast<int>(vectors.size());
  Box box(m);
  for (int i = 0; i < m; ++i) {
    auto [lo, hi] = std::minmax_element(vectors[i].begin(), vectors[i].end());
    double pad = std::max(1e-6, 1e-6 * std::abs(*hi));
    box[i] = {*lo - pad, *hi + pad};
  }
  Nonlinearity local = spec.with_domain(box);
  SampleGrid grid = m <= 4 ? SampleGrid::tensor(box, 8)
                           : SampleGrid::random(box, 2048, SampleGrid::kDefaultSeed);
  SubmodularityResult sub = check_submodular(local, grid);
  if (!sub.submodular())
    throw std::invalid_argument(
        "hl_inequality_check: spec is not submodular on the data's bounding "
        "box; the inequality can fail");

  HLReport rep;
  auto [s_sorted, s_orig] = hl_sums(vectors, spec);
  rep.sorted_sum = s_sorted;
  rep.original_sum = s_orig;
  rep.holds = s_sorted <= s_orig + eps;
  return rep;
}

void write_boxfield_csv(std::ostream& out, const BoxField& field) {
  const BoxGrid& g = field.grid;
  for (int d = 0; d < g.base_axes(); ++d) out << "x" << (d + 1) << ",";
  out << "xN";
  for (int i = 0; i < field.m(); ++i) out << ",u" << (i + 1);
  out << "\n" << std::setprecision(17);
  for (long long b = 0; b < g.base_points(); ++b) {
    Vec bp = g.base_point(b);
    for (int l = 0; l < g.vertical.n; ++l) {
      for (double c : bp) out << c << ",";
      out << g.vertical.node(l);
      for (int i = 0; i < field.m(); ++i) out << "," << field.at(i, b, l);
      out << "\n";
    }
  }
}

void write_boxfield_csv_file(const std::string& path, const BoxField& field) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  write_boxfield_csv(out, field);
}

BoxField read_boxfield_csv(std::istream& in, int base_axes) {
  if (base_axes < 1 || base_axes > 2)
    throw std::runtime_error("boxfield csv: base_axes must be 1 or 2");
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("boxfield csv: missing header");
  int cols = 1 + static_cast<int>(std::count(line.begin(), line.end(), ','));
  int m = cols - base_axes - 1;
  if (m < 1) throw std::runtime_error("boxfield csv: no components");

  std::vector<Vec> coords(base_axes + 1);
  std::vector<Vec> vals(m);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    for (int c = 0; c < cols; ++c) {
      if (!std::getline(row, cell, ','))
        throw std::runtime_error("boxfield csv: short row");
      double v = std::stod(cell);
      if (c <= base_axes)
        coords[c].push_back(v);
      else
        vals[c - base_axes - 1].push_back(v);
    }
  }
  // Recover the axes from the sorted unique coordinates.
  auto axis_of = [](const Vec& c) {
    Vec u = c;
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    if (u.size() < 2) throw std::runtime_error("boxfield csv: degenerate axis");
    return Mesh1D(u.front(), u.back(), static_cast<int>(u.size()));
  };
  BoxField f;
  for (int d = 0; d < base_axes; ++d) f.grid.base.push_back(axis_of(coords[d]));
  f.grid.vertical = axis_of(coords[base_axes]);
  const long long expect = f.grid.base_points() * f.grid.vertical.n;
  for (const Vec& v : vals)
    if (static_cast<long long>(v.size()) != expect)
      throw std::runtime_error("boxfield csv: row count does not fill the grid");
  f.components = std::move(vals);
  for (int i = 0; i < m; ++i)
    f.boundary.emplace_back(f.components[i][0],
                            f.components[i][f.grid.vertical.n - 1]);
  return f;
}

BoxField read_boxfield_csv_file(const std::string& path, int base_axes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return read_boxfield_csv(in, base_axes);
}

}  // namespace otsys
