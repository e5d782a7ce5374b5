#include "otsys/bvp.hpp"

#include <Eigen/Dense>

namespace otsys {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// max-norm (convergence gate) and l2 norm (damping gate; the Newton
// direction is a descent direction for the l2 norm but not the max norm)
std::pair<double, double> residual_norms(const Nonlinearity& spec,
                                         const FieldBundle& f) {
  const int n = f.mesh.n;
  const double h2 = f.mesh.h() * f.mesh.h();
  double worst = 0.0, sq = 0.0;
  for (int k = 1; k < n - 1; ++k) {
    Vec u = f.at(k);
    Vec g = spec.grad(u);
    for (int i = 0; i < f.m(); ++i) {
      double lap = (f.components[i][k + 1] - 2.0 * f.components[i][k] +
                    f.components[i][k - 1]) / h2;
      double r = lap - g[i];
      worst = std::max(worst, std::abs(r));
      sq += r * r;
    }
  }
  return {worst, std::sqrt(sq)};
}

// One Newton direction: solves J delta = -F with the block tridiagonal
// Jacobian (diagonal blocks -2/h^2 I - Hess H(u_k), off-diagonal 1/h^2 I)
// by block Thomas elimination.
std::vector<VectorXd> newton_direction(const Nonlinearity& spec,
                                       const FieldBundle& f) {
  const int n = f.mesh.n;
  const int m = f.m();
  const int N = n - 2;
  const double h2 = f.mesh.h() * f.mesh.h();
  const double off = 1.0 / h2;

  std::vector<MatrixXd> cprime(N);
  std::vector<VectorXd> rhs(N);
  MatrixXd D(m, m);
  VectorXd F(m);
  for (int k = 0; k < N; ++k) {
    Vec u = f.at(k + 1);
    SquareMat hess = spec.hess(u);
    Vec g = spec.grad(u);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) D(i, j) = -hess.at(i, j);
      D(i, i) -= 2.0 / h2;
      double lap = (f.components[i][k + 2] - 2.0 * f.components[i][k + 1] +
                    f.components[i][k]) / h2;
      F(i) = lap - g[i];
    }
    if (k == 0) {
      Eigen::PartialPivLU<MatrixXd> lu(D);
      cprime[k] = lu.solve(MatrixXd::Identity(m, m) * off);
      rhs[k] = lu.solve(-F);
    } else {
      MatrixXd M = D - off * cprime[k - 1];
      Eigen::PartialPivLU<MatrixXd> lu(M);
      cprime[k] = lu.solve(MatrixXd::Identity(m, m) * off);
      rhs[k] = lu.solve(-F - off * rhs[k - 1]);
    }
  }
  std::vector<VectorXd> delta(N);
  delta[N - 1] = rhs[N - 1];
  for (int k = N - 2; k >= 0; --k) delta[k] = rhs[k] - cprime[k] * delta[k + 1];
  return delta;
}

}  // namespace

double system_residual(const FieldBundle& field, const Nonlinearity& spec) {
  return residual_norms(spec, field).first;
}

std::pair<FieldBundle, SolveReport> solve_system_bvp(
    const Nonlinearity& spec, const Mesh1D& mesh,
    const std::vector<std::pair<double, double>>& boundary,
    const std::optional<FieldBundle>& initial_guess,
    const SolveOptions& options) {
  const int m = spec.m();
  if (static_cast<int>(boundary.size()) != m)
    throw std::invalid_argument("solve_system_bvp: boundary size != m");
  for (int i = 0; i < m; ++i) {
    // interpolation slack: profiles may poke slightly past the box
    double slack = 1e-9 * std::max(1.0, spec.domain()[i].width());
    if (!spec.domain()[i].contains(boundary[i].first, slack) ||
        !spec.domain()[i].contains(boundary[i].second, slack))
      throw std::invalid_argument(
          "solve_system_bvp: boundary value outside the spec domain");
  }

  FieldBundle f = initial_guess ? *initial_guess
                                : FieldBundle::linear(mesh, boundary);
  f.validate();
  if (f.mesh.n != mesh.n || f.m() != m)
    throw std::invalid_argument("solve_system_bvp: bad initial guess shape");
  for (int i = 0; i < m; ++i)
    if (f.boundary[i] != boundary[i])
      throw std::invalid_argument(
          "solve_system_bvp: initial guess does not match boundary data");

  SolveReport rep;
  auto [rn, rl2] = residual_norms(spec, f);
  rep.residual_history.push_back(rn);

  for (int it = 0; it < options.max_iterations && rn > options.tolerance; ++it) {
    auto delta = newton_direction(spec, f);
    double lambda = 1.0;
    int halvings = 0;
    FieldBundle trial = f;
    for (;;) {
      for (int k = 0; k < mesh.n - 2; ++k)
        for (int i = 0; i < m; ++i)
          trial.components[i][k + 1] =
              f.components[i][k + 1] + lambda * delta[k](i);
      auto [rt, rt2] = residual_norms(spec, trial);
      if (rt2 < rl2 || halvings >= options.max_halvings) {
        f = trial;
        rn = rt;
        rl2 = rt2;
        break;
      }
      lambda *= 0.5;
      ++halvings;
    }
    rep.damping_history.push_back(halvings);
    rep.residual_history.push_back(rn);
    rep.iterations = it + 1;
  }
  rep.final_residual = rn;
  rep.converged = rn <= options.tolerance;
  return {std::move(f), rep};
}

std::pair<Vec, SolveReport> solve_scalar_bvp(
    const std::function<double(double)>& Vp, const Mesh1D& mesh,
    std::pair<double, double> boundary, const std::optional<Vec>& initial_guess,
    const std::function<double(double)>& Vpp, const SolveOptions& options) {
  if (!Vp) throw std::invalid_argument("solve_scalar_bvp: missing V'");
  // Wrap as a one-component system on a box wide enough for the data.
  double lo = std::min(boundary.first, boundary.second);
  double hi = std::max(boundary.first, boundary.second);
  if (initial_guess)
    for (double v : *initial_guess) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  double pad = std::max(1.0, hi - lo);
  Box box = {Interval{lo - pad, hi + pad}};
  auto h = [Vp](const Vec& p) {
    (void)p;
    return 0.0;  // only the gradient and Hessian drive the solver
  };
  auto grad = [Vp](const Vec& p) { return Vec{Vp(p[0])}; };
  Nonlinearity::HessFn hess;
  if (Vpp) {
    hess = [Vpp](const Vec& p) {
      SquareMat m1(1);
      m1.at(0, 0) = Vpp(p[0]);
      return m1;
    };
  } else {
    hess = [Vp](const Vec& p) {
      const double step =
          std::cbrt(std::numeric_limits<double>::epsilon()) *
          std::max(1.0, std::abs(p[0]));
      SquareMat m1(1);
      m1.at(0, 0) = (Vp(p[0] + step) - Vp(p[0] - step)) / (2.0 * step);
      return m1;
    };
  }
  Nonlinearity scalar("scalar", 1, std::move(box), h, grad, hess);

  std::optional<FieldBundle> guess;
  if (initial_guess) {
    FieldBundle g;
    g.mesh = mesh;
    g.components = {*initial_guess};
    g.boundary = {{initial_guess->front(), initial_guess->back()}};
    guess = std::move(g);
  }
  auto [field, rep] =
      solve_system_bvp(scalar, mesh, {boundary}, guess, options);
  return {field.components[0], rep};
}

std::vector<MonotoneVerdict> check_monotone(const FieldBundle& field,
                                            double eps_mono) {
  const int n = field.mesh.n;
  std::vector<MonotoneVerdict> verdicts;
  for (const Vec& u : field.components) {
    MonotoneVerdict v;
    double span = u[n - 1] - u[0];
    int dir = span > 0 ? 1 : (span < 0 ? -1 : 0);
    if (dir == 0) {
      // flat boundary data: direction from the largest interior move
      double best = 0.0;
      for (int k = 0; k + 1 < n; ++k) {
        double d = u[k + 1] - u[k];
        if (std::abs(d) > std::abs(best)) best = d;
      }
      dir = best > 0 ? 1 : -1;
    }
    v.kind = dir > 0 ? Monotonicity::increasing : Monotonicity::decreasing;
    for (int k = 0; k + 1 < n; ++k) {
      double d = dir * (u[k + 1] - u[k]);
      bool boundary_adjacent = (k == 0) || (k + 2 == n);
      bool ok = boundary_adjacent ? d >= -eps_mono : d > eps_mono;
      if (!ok) {
        v.kind = Monotonicity::non_monotone;
        v.witness_node = k;
        break;
      }
    }
    verdicts.push_back(v);
  }
  return verdicts;
}

HMonotoneVerdict check_H_monotone(const FieldBundle& field,
                                  const Nonlinearity& spec, double eps_mono) {
  auto mono = check_monotone(field, eps_mono);
  for (size_t i = 0; i < mono.size(); ++i)
    if (!mono[i].monotone())
      throw std::invalid_argument(
          "check_H_monotone: component " + std::to_string(i + 1) +
          " is not monotone");

  const int n = field.mesh.n;
  const int m = field.m();
  HMonotoneVerdict v;
  bool any_neg = false, any_pos = false;
  for (int k = 0; k + 1 < n; ++k) {
    SquareMat h = spec.hess(field.at(k));
    for (int i = 0; i < m; ++i) {
      double di = field.components[i][k + 1] - field.components[i][k];
      if (std::abs(di) <= eps_mono) continue;
      for (int j = i + 1; j < m; ++j) {
        double dj = field.components[j][k + 1] - field.components[j][k];
        if (std::abs(dj) <= eps_mono) continue;
        double prod = h.at(i, j) * di * dj;
        if (prod < 0.0) {
          any_neg = true;
        } else {
          any_pos = true;
          if (v.witness_node < 0) {
            v.witness_node = k;
            v.witness_pair = {i, j};
          }
        }
      }
    }
  }
  if (any_neg && !any_pos)
    v.kind = HMonotoneKind::h_monotone;
  else if (any_pos && !any_neg)
    v.kind = HMonotoneKind::anti_h_monotone;
  else
    v.kind = HMonotoneKind::violated;
  if (v.kind == HMonotoneKind::h_monotone) {
    v.witness_node = -1;
    v.witness_pair = {-1, -1};
  }
  return v;
}

Orientation field_directions(const FieldBundle& field) {
  auto mono = check_monotone(field);
  Orientation o;
  for (const auto& v : mono)
    o.theta.push_back(v.kind == Monotonicity::decreasing ? -1 : 1);
  return o;
}

}  // namespace otsys
