#include "otsys/mmot.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>

namespace otsys {

Vec MonotoneCoupling::cumulative() const {
  Vec c(weights.size());
  std::partial_sum(weights.begin(), weights.end(), c.begin());
  if (!c.empty()) c.back() = 1.0;
  return c;
}

DiscreteMarginal MonotoneCoupling::marginal(int i) const {
  Vec vals(support.size());
  for (size_t k = 0; k < support.size(); ++k) vals[k] = support[k][i];
  return DiscreteMarginal::from_samples(vals, weights);
}

Vec MonotoneCoupling::at_level(double t) const {
  Vec cum = cumulative();
  auto it = std::lower_bound(cum.begin(), cum.end(), std::min(t, 1.0) - 1e-15);
  size_t k = std::min(static_cast<size_t>(it - cum.begin()), support.size() - 1);
  return support[k];
}

MonotoneCoupling solve_monotone(const std::vector<DiscreteMarginal>& marginals,
                                const Orientation& orientation) {
  const int m = static_cast<int>(marginals.size());
  if (m < 2) throw std::invalid_argument("solve_monotone: need m >= 2 marginals");
  if (orientation.size() != m)
    throw std::invalid_argument("solve_monotone: orientation length mismatch");

  std::vector<DiscreteMarginal> flipped;
  flipped.reserve(m);
  for (int i = 0; i < m; ++i)
    flipped.push_back(orientation.theta[i] == 1 ? marginals[i]
                                                : marginals[i].negated());

  // Union of cumulative breakpoints.
  Vec bps;
  for (const auto& mu : flipped)
    for (double c : mu.cumulative()) bps.push_back(c);
  bps.push_back(1.0);
  std::sort(bps.begin(), bps.end());
  Vec levels;
  for (double t : bps) {
    // sub-1e-13 slices are cumsum rounding, not mass
    if (t <= 1e-13 || t > 1.0 + 1e-12) continue;
    if (!levels.empty() && t - levels.back() <= 1e-13) continue;
    levels.push_back(std::min(t, 1.0));
  }
  if (!levels.empty() && 1.0 - levels.back() <= 1e-13) levels.back() = 1.0;

  MonotoneCoupling out;
  out.orientation = orientation;
  double prev = 0.0;
  for (double t : levels) {
    double w = t - prev;
    prev = t;
    if (w <= 1e-15) continue;
    Vec tuple(m);
    for (int i = 0; i < m; ++i)
      tuple[i] = orientation.theta[i] * flipped[i].quantile(t);
    out.support.push_back(std::move(tuple));
    out.weights.push_back(w);
  }
  return out;
}

double coupling_cost(const MonotoneCoupling& coupling, const Nonlinearity& spec) {
  double c = 0.0;
  for (int k = 0; k < coupling.size(); ++k)
    c += coupling.weights[k] * spec.H(coupling.support[k]);
  return c;
}

PathPotentials build_potentials(const MonotoneCoupling& coupling,
                                const Nonlinearity& spec,
                                double refine_density) {
  if (coupling.size() == 0)
    throw std::invalid_argument("build_potentials: empty coupling");
  PathPotentials::BuildOptions opt;
  opt.refine_density = refine_density;
  opt.anchor_vertex = 0;  // sum V_i = H at the first support tuple
  return PathPotentials::build(coupling.support, spec, opt);
}

namespace {

int default_resolution(int m) {
  double cap = std::pow(1.2e6, 1.0 / m);
  return std::max(2, std::min(33, static_cast<int>(cap)));
}

// Odometer loop over the product of per-axis grids.
template <typename F>
void for_each_grid_point(const std::vector<Vec>& axes, F&& fn) {
  const int m = static_cast<int>(axes.size());
  std::vector<size_t> idx(m, 0);
  Vec p(m);
  for (;;) {
    for (int i = 0; i < m; ++i) p[i] = axes[i][idx[i]];
    fn(p);
    int d = m - 1;
    while (d >= 0 && ++idx[d] == axes[d].size()) idx[d--] = 0;
    if (d < 0) break;
  }
}

std::vector<Vec> range_axes(const PathPotentials& potentials, int res) {
  std::vector<Vec> axes(potentials.m());
  for (int i = 0; i < potentials.m(); ++i) {
    const PotentialTable& t = potentials.table(i);
    if (t.single_point()) {
      axes[i] = {t.lo()};
      continue;
    }
    axes[i].resize(res);
    for (int k = 0; k < res; ++k)
      axes[i][k] = t.lo() + (t.hi() - t.lo()) * k / (res - 1);
  }
  return axes;
}

}  // namespace

DualityCertificate certify(const MonotoneCoupling& coupling,
                           const PathPotentials& potentials,
                           const Nonlinearity& spec, int resolution) {
  DualityCertificate cert;
  cert.resolution = resolution > 0 ? resolution : default_resolution(spec.m());

  cert.primal_cost = coupling_cost(coupling, spec);

  double dual = 0.0;
  for (int i = 0; i < spec.m(); ++i) {
    DiscreteMarginal mu = coupling.marginal(i);
    for (int k = 0; k < mu.size(); ++k)
      dual += mu.weights()[k] * potentials.value(i, mu.atoms()[k]);
  }
  cert.dual_value = dual;

  double gap = 0.0;
  for (int k = 0; k < coupling.size(); ++k)
    gap = std::max(gap, std::abs(spec.H(coupling.support[k]) -
                                 potentials.sum_values(coupling.support[k])));
  cert.max_support_gap = gap;

  double viol = -std::numeric_limits<double>::infinity();
  auto axes = range_axes(potentials, cert.resolution);
  for_each_grid_point(axes, [&](const Vec& p) {
    viol = std::max(viol, potentials.sum_values(p) - spec.H(p));
  });
  cert.max_feasibility_violation = viol;
  return cert;
}

double infconv_extension(const PathPotentials& potentials,
                         const Nonlinearity& spec, int i, double p_i,
                         int resolution) {
  std::vector<Vec> axes = range_axes(potentials, resolution);
  axes[i] = {p_i};
  double best = std::numeric_limits<double>::infinity();
  for_each_grid_point(axes, [&](const Vec& p) {
    double s = 0.0;
    for (int j = 0; j < spec.m(); ++j)
      if (j != i) s += potentials.value(j, p[j]);
    best = std::min(best, spec.H(p) - s);
  });
  return best;
}

OracleResult brute_force_oracle(const std::vector<DiscreteMarginal>& marginals,
                                const Nonlinearity& spec) {
  const int m = static_cast<int>(marginals.size());
  if (m < 2 || m > 4)
    throw std::invalid_argument(
        "brute_force_oracle: enumeration bound requires 2 <= m <= 4");
  const int n = marginals[0].size();
  if (n > 6)
    throw std::invalid_argument(
        "brute_force_oracle: enumeration bound requires n <= 6 atoms");
  for (const auto& mu : marginals) {
    if (mu.size() != n)
      throw std::invalid_argument("brute_force_oracle: equal atom counts required");
    for (double w : mu.weights())
      if (std::abs(w - 1.0 / n) > 1e-12)
        throw std::invalid_argument("brute_force_oracle: uniform marginals required");
  }

  std::vector<std::vector<int>> perms(m - 1);
  for (auto& p : perms) {
    p.resize(n);
    std::iota(p.begin(), p.end(), 0);
  }

  OracleResult best;
  best.min_cost = std::numeric_limits<double>::infinity();
  Vec tuple(m);
  // Odometer over lexicographically ordered permutation tuples.
  for (;;) {
    double cost = 0.0;
    for (int k = 0; k < n; ++k) {
      tuple[0] = marginals[0].atoms()[k];
      for (int c = 1; c < m; ++c)
        tuple[c] = marginals[c].atoms()[perms[c - 1][k]];
      cost += spec.H(tuple);
    }
    cost /= n;
    if (cost < best.min_cost) {
      best.min_cost = cost;
      best.argmin = perms;
    }
    int c = m - 2;
    while (c >= 0 && !std::next_permutation(perms[c].begin(), perms[c].end()))
      --c;
    if (c < 0) break;
    for (int r = c + 1; r < m - 1; ++r)
      std::iota(perms[r].begin(), perms[r].end(), 0);
  }
  return best;
}

MonotoneCoupling pushforward_coupling(const FieldBundle& field,
                                      const Orientation& orientation) {
  const int m = field.m();
  const int n = field.mesh.n;
  if (orientation.size() != m)
    throw std::invalid_argument("pushforward_coupling: orientation mismatch");

  std::vector<Vec> tuples(n);
  for (int k = 0; k < n; ++k) tuples[k] = field.at(k);
  // Order tuples by the flipped first coordinate (increasing mass level).
  std::stable_sort(tuples.begin(), tuples.end(),
                   [&](const Vec& a, const Vec& b) {
                     return orientation.theta[0] * a[0] <
                            orientation.theta[0] * b[0];
                   });
  MonotoneCoupling out;
  out.orientation = orientation;
  const double w = 1.0 / n;
  for (int k = 0; k < n; ++k) {
    if (!out.support.empty() && tuples[k] == out.support.back()) {
      out.weights.back() += w;
    } else {
      out.support.push_back(tuples[k]);
      out.weights.push_back(w);
    }
  }
  return out;
}

double support_distance(const MonotoneCoupling& a, const MonotoneCoupling& b) {
  // Evaluate at the midpoints of the union slice partition; comparing at
  // the breakpoints themselves is knife-edged under cumsum rounding.
  Vec levels = {0.0};
  for (double t : a.cumulative()) levels.push_back(t);
  for (double t : b.cumulative()) levels.push_back(t);
  std::sort(levels.begin(), levels.end());
  double dist = 0.0;
  for (size_t k = 0; k + 1 < levels.size(); ++k) {
    // intervals below the weight-merge tolerance are reslicing artifacts
    if (levels[k + 1] - levels[k] <= 1e-12) continue;
    double t = 0.5 * (levels[k] + levels[k + 1]);
    Vec pa = a.at_level(t);
    Vec pb = b.at_level(t);
    for (size_t i = 0; i < pa.size(); ++i)
      dist = std::max(dist, std::abs(pa[i] - pb[i]));
  }
  return dist;
}

void write_coupling_csv_file(const std::string& path,
                             const MonotoneCoupling& coupling) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  for (int i = 0; i < coupling.m(); ++i) out << "p" << (i + 1) << ",";
  out << "weight\n" << std::setprecision(17);
  for (int k = 0; k < coupling.size(); ++k) {
    for (double v : coupling.support[k]) out << v << ",";
    out << coupling.weights[k] << "\n";
  }
}

PushforwardReport verify_pushforward_optimality(const FieldBundle& field,
                                                const Nonlinearity& spec,
                                                const Orientation& orientation,
                                                double eps) {
  PushforwardReport rep;
  rep.pushforward = pushforward_coupling(field, orientation);

  std::vector<DiscreteMarginal> marginals;
  for (int i = 0; i < field.m(); ++i)
    marginals.push_back(DiscreteMarginal::from_samples(field.components[i]));

  rep.monotone = solve_monotone(marginals, orientation);
  rep.support_distance = support_distance(rep.pushforward, rep.monotone);

  PathPotentials pots = build_potentials(rep.pushforward, spec);
  rep.certificate = certify(rep.pushforward, pots, spec);
  rep.coincides = rep.support_distance <= 1e-10;
  rep.pass = rep.coincides && rep.certificate.pass(eps);
  return rep;
}

}  // namespace otsys
