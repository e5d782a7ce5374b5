#include "otsys/nonlinearity.hpp"

#include <limits>
#include <random>
#include <sstream>

namespace otsys {

Nonlinearity::Nonlinearity(std::string name, int m, Box domain, HFn h,
                           GradFn grad, HessFn hess)
    : name_(std::move(name)),
      m_(m),
      domain_(std::move(domain)),
      h_(std::move(h)),
      grad_(std::move(grad)),
      hess_(std::move(hess)) {
  if (m_ < 1) throw std::invalid_argument("Nonlinearity: m must be >= 1");
  if (static_cast<int>(domain_.size()) != m_)
    throw std::invalid_argument("Nonlinearity: domain size != m");
  for (const auto& iv : domain_)
    if (!(iv.width() > 0.0))
      throw std::invalid_argument("Nonlinearity: degenerate domain interval");
  if (!h_ || !grad_)
    throw std::invalid_argument("Nonlinearity: H and gradient are required");
}

double Nonlinearity::H(const Vec& p) const {
  if (static_cast<int>(p.size()) != m_)
    throw std::invalid_argument("Nonlinearity::H: bad point dimension");
  double v = h_(p);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "Nonlinearity::H: non-finite value at (";
    for (size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
    os << ")";
    throw std::runtime_error(os.str());
  }
  return v;
}

Vec Nonlinearity::grad(const Vec& p) const {
  if (static_cast<int>(p.size()) != m_)
    throw std::invalid_argument("Nonlinearity::grad: bad point dimension");
  Vec g = grad_(p);
  if (static_cast<int>(g.size()) != m_)
    throw std::runtime_error("Nonlinearity::grad: evaluator returned wrong size");
  for (double v : g)
    if (!std::isfinite(v))
      throw std::runtime_error("Nonlinearity::grad: non-finite value");
  return g;
}

SquareMat Nonlinearity::hess(const Vec& p) const {
  if (static_cast<int>(p.size()) != m_)
    throw std::invalid_argument("Nonlinearity::hess: bad point dimension");
  if (hess_) {
    SquareMat h = hess_(p);
    if (h.n != m_)
      throw std::runtime_error("Nonlinearity::hess: evaluator returned wrong size");
    return h;
  }
  // Central differences of the gradient, step eps^{1/3} * max(1, |p_i|).
  SquareMat h(m_);
  const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  Vec q = p;
  for (int j = 0; j < m_; ++j) {
    double step = base * std::max(1.0, std::abs(p[j]));
    q[j] = p[j] + step;
    Vec gp = grad_(q);
    q[j] = p[j] - step;
    Vec gm = grad_(q);
    q[j] = p[j];
    for (int i = 0; i < m_; ++i) h.at(i, j) = (gp[i] - gm[i]) / (2.0 * step);
  }
  // Symmetrize: the FD estimates of H_ij and H_ji differ by rounding only.
  for (int i = 0; i < m_; ++i)
    for (int j = i + 1; j < m_; ++j) {
      double s = 0.5 * (h.at(i, j) + h.at(j, i));
      h.at(i, j) = s;
      h.at(j, i) = s;
    }
  return h;
}

Nonlinearity Nonlinearity::with_domain(Box domain) const {
  return Nonlinearity(name_, m_, std::move(domain), h_, grad_, hess_);
}

Nonlinearity Nonlinearity::reflected(const std::vector<int>& sigma) const {
  if (static_cast<int>(sigma.size()) != m_)
    throw std::invalid_argument("Nonlinearity::reflected: sigma size != m");
  for (int s : sigma)
    if (s != 1 && s != -1)
      throw std::invalid_argument("Nonlinearity::reflected: sigma entries must be +-1");

  Box box(m_);
  for (int i = 0; i < m_; ++i) {
    if (sigma[i] == 1)
      box[i] = domain_[i];
    else
      box[i] = {-domain_[i].hi, -domain_[i].lo};
  }
  auto to_p = [sigma, m = m_](const Vec& q) {
    Vec p(m);
    for (int i = 0; i < m; ++i) p[i] = sigma[i] * q[i];
    return p;
  };
  HFn h = [f = h_, to_p](const Vec& q) { return f(to_p(q)); };
  GradFn grad = [g = grad_, to_p, sigma, m = m_](const Vec& q) {
    Vec gp = g(to_p(q));
    for (int i = 0; i < m; ++i) gp[i] *= sigma[i];
    return gp;
  };
  HessFn hess;
  if (hess_) {
    hess = [hh = hess_, to_p, sigma, m = m_](const Vec& q) {
      SquareMat hp = hh(to_p(q));
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          hp.at(i, j) *= sigma[i] * sigma[j];
      return hp;
    };
  }
  return Nonlinearity(name_ + "#flipped", m_, std::move(box), std::move(h),
                      std::move(grad), std::move(hess));
}

Nonlinearity Nonlinearity::negated() const {
  HFn h = [f = h_](const Vec& p) { return -f(p); };
  GradFn grad = [g = grad_](const Vec& p) {
    Vec gp = g(p);
    for (double& v : gp) v = -v;
    return gp;
  };
  HessFn hess;
  if (hess_) {
    hess = [hh = hess_](const Vec& p) {
      SquareMat hp = hh(p);
      for (double& v : hp.a) v = -v;
      return hp;
    };
  }
  return Nonlinearity("-" + name_, m_, domain_, std::move(h), std::move(grad),
                      std::move(hess));
}

SampleGrid SampleGrid::tensor(const Box& box, int per_axis) {
  if (per_axis < 1) throw std::invalid_argument("SampleGrid::tensor: per_axis < 1");
  const int m = static_cast<int>(box.size());
  SampleGrid g;
  g.strategy = "tensor";
  g.count_per_axis = per_axis;
  std::vector<int> idx(m, 0);
  Vec p(m);
  for (;;) {
    for (int i = 0; i < m; ++i) {
      p[i] = per_axis == 1
                 ? box[i].center()
                 : box[i].lo + box[i].width() * idx[i] / (per_axis - 1);
    }
    g.points.push_back(p);
    int d = m - 1;
    while (d >= 0 && ++idx[d] == per_axis) idx[d--] = 0;
    if (d < 0) break;
  }
  return g;
}

SampleGrid SampleGrid::random(const Box& box, int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("SampleGrid::random: count < 1");
  SampleGrid g;
  g.strategy = "random";
  g.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int m = static_cast<int>(box.size());
  for (int k = 0; k < count; ++k) {
    Vec p(m);
    for (int i = 0; i < m; ++i) p[i] = box[i].lo + box[i].width() * unit(rng);
    g.points.push_back(std::move(p));
  }
  return g;
}

SampleGrid SampleGrid::standard(const Box& box, std::uint64_t seed) {
  return box.size() <= 4 ? tensor(box, 16)
                         : random(box, 4096, seed);
}

namespace {

// theta_1 = +1; theta_i = +1 iff H_{1i} < 0 at the reference point.  With
// this choice theta_i theta_j H_ij < 0 follows from compatibility; the
// verdict still re-verifies the sign condition on the whole grid.
std::optional<std::vector<int>> theta_candidate(const Nonlinearity& spec,
                                                const Vec& ref,
                                                double eps_sign) {
  SquareMat h = spec.hess(ref);
  std::vector<int> theta(spec.m(), 1);
  for (int i = 1; i < spec.m(); ++i) {
    double v = h.at(0, i);
    if (std::abs(v) <= eps_sign) return std::nullopt;
    theta[i] = v < 0.0 ? 1 : -1;
  }
  return theta;
}

}  // namespace

OrientabilityResult check_orientable(const Nonlinearity& spec,
                                     const SampleGrid& grid, double eps_sign) {
  if (spec.m() < 2)
    throw std::invalid_argument("check_orientable: m must be >= 2");
  if (grid.points.empty())
    throw std::invalid_argument("check_orientable: empty grid");

  OrientabilityResult res;
  const Vec ref = box_center(spec.domain());
  auto cand = theta_candidate(spec, ref, eps_sign);
  if (!cand) {
    res.verdict = Verdict::degenerate;
    SquareMat h = spec.hess(ref);
    for (int i = 1; i < spec.m(); ++i)
      if (std::abs(h.at(0, i)) <= eps_sign) {
        res.witness = Witness{ref, {0, i}, h.at(0, i)};
        break;
      }
    return res;
  }
  const std::vector<int>& theta = *cand;
  for (const Vec& p : grid.points) {
    SquareMat h = spec.hess(p);
    for (int i = 0; i < spec.m(); ++i)
      for (int j = 0; j < spec.m(); ++j) {
        if (i == j) continue;
        double v = theta[i] * theta[j] * h.at(i, j);
        if (!(v < -eps_sign)) {
          res.verdict = Verdict::fail;
          res.witness = Witness{p, {i, j}, v};
          return res;
        }
      }
  }
  res.verdict = Verdict::pass;
  res.theta = Orientation{theta};
  return res;
}

CompatibilityResult check_compatible(const Nonlinearity& spec,
                                     const SampleGrid& grid, double eps_sign) {
  if (grid.points.empty())
    throw std::invalid_argument("check_compatible: empty grid");
  CompatibilityResult res;
  if (spec.m() == 2) {
    // Definition quantifies over distinct triples; none exist for m = 2.
    res.verdict = Verdict::pass;
    res.vacuous = true;
    return res;
  }
  if (spec.m() < 2)
    throw std::invalid_argument("check_compatible: m must be >= 2");

  for (const Vec& p : grid.points) {
    SquareMat h = spec.hess(p);
    for (int i = 0; i < spec.m(); ++i)
      for (int j = 0; j < spec.m(); ++j) {
        if (j == i) continue;
        for (int k = 0; k < spec.m(); ++k) {
          if (k == i || k == j) continue;
          double denom = h.at(k, j);
          if (std::abs(denom) <= eps_sign) {
            res.verdict = Verdict::degenerate;
            res.witness = Witness{p, {i, j, k}, denom};
            return res;
          }
          double q = h.at(i, j) * h.at(k, i) / denom;
          if (!(q < -eps_sign)) {
            res.verdict = Verdict::fail;
            res.witness = Witness{p, {i, j, k}, q};
            return res;
          }
        }
      }
  }
  res.verdict = Verdict::pass;
  return res;
}

SubmodularityResult check_submodular(const Nonlinearity& spec,
                                     const SampleGrid& grid, double eps_sign,
                                     double eps_fourpoint) {
  if (grid.points.empty())
    throw std::invalid_argument("check_submodular: empty grid");
  SubmodularityResult res;
  for (const Vec& p : grid.points) {
    SquareMat h = spec.hess(p);
    for (int i = 0; i < spec.m(); ++i)
      for (int j = 0; j < spec.m(); ++j) {
        if (i == j) continue;
        if (!(h.at(i, j) < -eps_sign)) {
          res.verdict = Verdict::fail;
          res.smooth_witness = Witness{p, {i, j}, h.at(i, j)};
          return res;
        }
      }
  }

  // Discrete four-point test: H(p+he_i+ke_j) + H(p) - H(p+he_i) - H(p+ke_j)
  // must not exceed eps_fourpoint whenever all four corners stay in the box.
  const Box& box = spec.domain();
  const double frac[3] = {0.25, 0.5, 1.0};
  for (const Vec& p : grid.points) {
    for (int i = 0; i < spec.m(); ++i)
      for (int j = i + 1; j < spec.m(); ++j)
        for (double fi : frac)
          for (double fj : frac) {
            double hstep = fi * box[i].width() / 4.0;
            double kstep = fj * box[j].width() / 4.0;
            if (p[i] + hstep > box[i].hi || p[j] + kstep > box[j].hi) continue;
            Vec pi = p, pj = p, pij = p;
            pi[i] += hstep;
            pj[j] += kstep;
            pij[i] += hstep;
            pij[j] += kstep;
            double d = spec.H(pij) + spec.H(p) - spec.H(pi) - spec.H(pj);
            if (d > eps_fourpoint) {
              res.verdict = Verdict::fail;
              res.fourpoint_witness = Witness{p, {i, j}, d};
              return res;
            }
          }
  }
  res.verdict = Verdict::pass;
  return res;
}

FlipResult flip_to_submodular(const Nonlinearity& spec, double eps_sign) {
  const Vec ref = box_center(spec.domain());
  auto cand = theta_candidate(spec, ref, eps_sign);
  if (!cand)
    throw std::runtime_error(
        "flip_to_submodular: H_{1i} vanishes at the box center; shrink the "
        "domain to a region with non-degenerate mixed derivatives");
  // sigma_i = +1 when H_{1i} < 0, which is exactly the theta candidate.
  return FlipResult{*cand, spec.reflected(*cand)};
}

EquivalenceReport verify_equivalence(const Nonlinearity& spec,
                                     const SampleGrid& grid, double eps_sign) {
  EquivalenceReport rep;
  rep.orientability = check_orientable(spec, grid, eps_sign);
  rep.compatibility = check_compatible(spec, grid, eps_sign);

  bool flip_ok = true;
  try {
    FlipResult flip = flip_to_submodular(spec, eps_sign);
    rep.sigma = flip.sigma;
    // Reflect the grid points alongside the spec.
    SampleGrid flipped_grid = grid;
    for (Vec& p : flipped_grid.points)
      for (int i = 0; i < spec.m(); ++i) p[i] *= flip.sigma[i];
    rep.submodularity_after_flip =
        check_submodular(flip.flipped, flipped_grid, eps_sign);
  } catch (const std::runtime_error&) {
    flip_ok = false;
  }

  bool o = rep.orientability.verdict == Verdict::pass;
  bool c = rep.compatibility.verdict == Verdict::pass;
  bool s = flip_ok && rep.submodularity_after_flip &&
           rep.submodularity_after_flip->verdict == Verdict::pass;
  rep.all_pass = o && c && s;
  if (rep.compatibility.vacuous) {
    rep.consistent = (o == s);
  } else {
    rep.consistent = (o == c) && (c == s);
  }
  return rep;
}

SpecAudit audit_spec(const Nonlinearity& spec, const SampleGrid& grid) {
  SpecAudit audit;
  const int m = spec.m();
  for (const Vec& p : grid.points) {
    SquareMat h = spec.hess(p);
    double scale = 0.0;
    for (double v : h.a) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        double asym = std::abs(h.at(i, j) - h.at(j, i)) / std::max(1.0, scale);
        audit.hess_asymmetry = std::max(audit.hess_asymmetry, asym);
      }
  }
  // Gradient against central differences of H at two step sizes; the
  // smaller step must not be worse than the h^2 extrapolation allows.
  size_t stride = std::max<size_t>(1, grid.points.size() / 16);
  for (size_t k = 0; k < grid.points.size(); k += stride) {
    const Vec& p = grid.points[k];
    Vec g = spec.grad(p);
    for (int i = 0; i < m; ++i) {
      double gscale = std::max(1.0, max_abs(g));
      for (double step : {1e-5, 5e-6}) {
        Vec q = p;
        q[i] = p[i] + step;
        double fp = spec.H(q);
        q[i] = p[i] - step;
        double fm = spec.H(q);
        double fd = (fp - fm) / (2.0 * step);
        double defect = std::abs(fd - g[i]) / gscale;
        // central difference error ~ step^2 * |H'''| + rounding / step
        double allow = 50.0 * step * step + 1e-10 / step;
        if (defect > allow)
          audit.grad_defect = std::max(audit.grad_defect, defect);
      }
    }
  }
  audit.ok = audit.hess_asymmetry <= 1e-8 && audit.grad_defect == 0.0;
  return audit;
}

}  // namespace otsys
