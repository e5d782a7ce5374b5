#include "otsys/potentials.hpp"

namespace otsys {

namespace {

// Increment of V_i over the sub-interval [ta, tb] of the straight segment
// va -> vb, for all components at once: int dH/dp_i (p(t)) * (vb_i - va_i) dt.
void gl_increment(const Nonlinearity& spec, const Vec& va, const Vec& vb,
                  double ta, double tb, Vec& dv) {
  const int m = spec.m();
  std::fill(dv.begin(), dv.end(), 0.0);
  Vec p(m);
  for (int q = 0; q < 4; ++q) {
    double t = ta + (tb - ta) * GaussLegendre4::x[q];
    for (int i = 0; i < m; ++i) p[i] = va[i] + t * (vb[i] - va[i]);
    Vec g = spec.grad(p);
    double w = GaussLegendre4::w[q] * (tb - ta);
    for (int i = 0; i < m; ++i) dv[i] += w * g[i] * (vb[i] - va[i]);
  }
}

}  // namespace

PathPotentials PathPotentials::build(std::vector<Vec> vertices,
                                     const Nonlinearity& spec,
                                     const BuildOptions& options) {
  const int m = spec.m();
  if (vertices.size() < 1)
    throw std::invalid_argument("PathPotentials: empty path");
  for (const Vec& v : vertices)
    if (static_cast<int>(v.size()) != m)
      throw std::invalid_argument("PathPotentials: vertex dimension != m");
  if (options.anchor_vertex < 0 ||
      options.anchor_vertex >= static_cast<int>(vertices.size()))
    throw std::invalid_argument("PathPotentials: anchor vertex out of range");

  // Drop exactly-duplicated consecutive vertices.
  std::vector<Vec> vtx;
  int anchor = options.anchor_vertex;
  for (size_t k = 0; k < vertices.size(); ++k) {
    if (!vtx.empty() && vertices[k] == vtx.back()) {
      if (static_cast<int>(k) <= options.anchor_vertex) anchor--;
      continue;
    }
    vtx.push_back(vertices[k]);
  }
  anchor = std::clamp(anchor, 0, static_cast<int>(vtx.size()) - 1);
  const int segs = static_cast<int>(vtx.size()) - 1;

  // Directions and ranges; each component must be monotone along the path.
  std::vector<int> dir(m, 0);
  Vec range(m, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < segs; ++k) {
      double d = vtx[k + 1][i] - vtx[k][i];
      if (d == 0.0) continue;
      int s = d > 0 ? 1 : -1;
      if (dir[i] == 0)
        dir[i] = s;
      else if (dir[i] != s)
        throw std::invalid_argument(
            "PathPotentials: component " + std::to_string(i + 1) +
            " is not monotone along the path");
    }
    if (!vtx.empty()) range[i] = std::abs(vtx.back()[i] - vtx.front()[i]);
  }

  // Refinement: shared sub-division of each segment, sized so that every
  // moving component's knot spacing is at most range_i / refine_density.
  std::vector<long long> subs(std::max(segs, 0), 1);
  long long total = 0;
  for (int k = 0; k < segs; ++k) {
    long long s = 1;
    for (int i = 0; i < m; ++i) {
      if (range[i] <= 0.0) continue;
      double target = range[i] / options.refine_density;
      double d = std::abs(vtx[k + 1][i] - vtx[k][i]);
      if (d > 0.0)
        s = std::max(s, static_cast<long long>(std::ceil(d / target)));
    }
    subs[k] = s;
    total += s;
  }
  if (total > static_cast<long long>(options.max_total_knots)) {
    double scale = static_cast<double>(options.max_total_knots) / total;
    for (auto& s : subs) s = std::max<long long>(1, static_cast<long long>(s * scale));
  }

  PathPotentials pp;
  pp.vertices_ = vtx;
  pp.spec_ = std::make_shared<Nonlinearity>(spec);
  pp.shifts_.assign(m, 0.0);
  pp.anchor_ = anchor;
  pp.tables_.resize(m);
  pp.comp_segments_.resize(m);

  // Seed knots with the first vertex.
  Vec acc(m, 0.0);  // accumulated V_i along the path
  {
    Vec g0 = spec.grad(vtx.front());
    for (int i = 0; i < m; ++i) {
      pp.tables_[i].knots.push_back(vtx.front()[i]);
      pp.tables_[i].values.push_back(0.0);
      pp.tables_[i].derivs.push_back(g0[i]);
    }
  }

  Vec dv(m), p(m);
  for (int k = 0; k < segs; ++k) {
    const Vec& va = vtx[k];
    const Vec& vb = vtx[k + 1];
    for (int i = 0; i < m; ++i)
      if (vb[i] != va[i])
        pp.comp_segments_[i].push_back({k, va[i], vb[i], acc[i]});
    const long long r = subs[k];
    for (long long s = 0; s < r; ++s) {
      double ta = static_cast<double>(s) / r;
      double tb = static_cast<double>(s + 1) / r;
      gl_increment(spec, va, vb, ta, tb, dv);
      for (int i = 0; i < m; ++i) acc[i] += dv[i];
      for (int i = 0; i < m; ++i) p[i] = va[i] + tb * (vb[i] - va[i]);
      if (s + 1 == r) p = vb;  // land on the vertex exactly
      Vec g = spec.grad(p);
      for (int i = 0; i < m; ++i) {
        if (vb[i] == va[i]) continue;  // no knot while the coordinate rests
        pp.tables_[i].knots.push_back(p[i]);
        pp.tables_[i].values.push_back(acc[i]);
        pp.tables_[i].derivs.push_back(g[i]);
      }
    }
  }

  // Tables ascending in p; reverse the decreasing components.
  for (int i = 0; i < m; ++i) {
    PotentialTable& t = pp.tables_[i];
    if (dir[i] < 0) {
      std::reverse(t.knots.begin(), t.knots.end());
      std::reverse(t.values.begin(), t.values.end());
      std::reverse(t.derivs.begin(), t.derivs.end());
    }
    for (size_t k = 1; k < t.knots.size(); ++k)
      if (!(t.knots[k] > t.knots[k - 1]))
        throw std::runtime_error("PathPotentials: non-increasing knot grid");
  }

  // Gauge: V_i = 0 at the lowest knot, then assign the anchor discrepancy
  // sum_i V_i(anchor) = H(anchor) to component 1.
  for (int i = 0; i < m; ++i) {
    double v0 = pp.tables_[i].values.front();
    for (double& v : pp.tables_[i].values) v -= v0;
    pp.shifts_[i] -= v0;
  }
  const Vec& pa = vtx[static_cast<size_t>(anchor)];
  double d = spec.H(pa) - pp.sum_values(pa);
  for (double& v : pp.tables_[0].values) v += d;
  pp.shifts_[0] += d;
  pp.anchor_shift_ = d;
  return pp;
}

double PathPotentials::sum_values(const Vec& p) const {
  double s = 0.0;
  for (int i = 0; i < m(); ++i) s += tables_[i].value(p[i]);
  return s;
}

void PathPotentials::shift(int i, double c) {
  for (double& v : tables_[i].values) v += c;
  shifts_[i] += c;
}

double PathPotentials::value_exact(int i, double p) const {
  const PotentialTable& t = tables_[i];
  if (t.single_point()) return t.values.front();
  if (p <= t.lo()) return t.values.front();
  if (p >= t.hi()) return t.values.back();
  // Locate the path segment whose i-th coordinate spans p.
  const auto& segs = comp_segments_[i];
  auto in_seg = [p](const CompSegment& cs) {
    return (p >= std::min(cs.p_a, cs.p_b)) && (p <= std::max(cs.p_a, cs.p_b));
  };
  // coordinates are monotone along the path, so binary search works
  size_t lo = 0, hi = segs.size();
  bool increasing = segs.front().p_b > segs.front().p_a;
  while (lo + 1 < hi) {
    size_t mid = (lo + hi) / 2;
    double start = segs[mid].p_a;
    if (increasing ? (start <= p) : (start >= p))
      lo = mid;
    else
      hi = mid;
  }
  size_t j = lo;
  if (!in_seg(segs[j]) && j + 1 < segs.size() && in_seg(segs[j + 1])) ++j;
  const CompSegment& cs = segs[j];
  const Vec& va = vertices_[cs.seg];
  const Vec& vb = vertices_[cs.seg + 1];
  double tau = (p - cs.p_a) / (cs.p_b - cs.p_a);
  Vec dv(m(), 0.0);
  gl_increment(*spec_, va, vb, 0.0, tau, dv);
  return cs.v_a + dv[i] + shifts_[i];
}

}  // namespace otsys
