#ifndef OTSYS_MMOT_HPP_
#define OTSYS_MMOT_HPP_

#include "otsys/field.hpp"
#include "otsys/marginal.hpp"
#include "otsys/potentials.hpp"

namespace otsys {

// Discrete coupling of m one-dimensional marginals supported on a monotone
// set: in the flipped coordinates q_i = theta_i p_i, the support tuples are
// simultaneously non-decreasing when sorted by mass level.
struct MonotoneCoupling {
  std::vector<Vec> support;  // tuples in R^m, ordered by mass level
  Vec weights;               // positive, sum to 1
  Orientation orientation;

  int m() const { return support.empty() ? 0 : static_cast<int>(support[0].size()); }
  int size() const { return static_cast<int>(support.size()); }
  Vec cumulative() const;

  // Projection onto coordinate i (merges equal atoms).
  DiscreteMarginal marginal(int i) const;

  // Support tuple at mass level t in (0, 1].
  Vec at_level(double t) const;
};

// Simultaneous-quantile coupling: flip each marginal by theta_i, sweep the
// union of cumulative breakpoints, pair left-continuous quantiles, flip back.
MonotoneCoupling solve_monotone(const std::vector<DiscreteMarginal>& marginals,
                                const Orientation& orientation);

// sum_k w_k H(support_k).
double coupling_cost(const MonotoneCoupling& coupling, const Nonlinearity& spec);

// Kantorovich potentials for a monotone coupling, built by integrating
// dV_i = dH/dp_i along the support path.  Gauge: V_i = 0 at the lowest
// knot, then sum_i V_i = H pinned at the first support tuple via V_1.
PathPotentials build_potentials(const MonotoneCoupling& coupling,
                                const Nonlinearity& spec,
                                double refine_density = 32768.0);

struct DualityCertificate {
  double primal_cost = 0.0;
  double dual_value = 0.0;
  double max_feasibility_violation = 0.0;  // max of sum V_i - H on the grid
  double max_support_gap = 0.0;            // max |H - sum V_i| on support
  int resolution = 0;                      // per-axis grid resolution used

  bool pass(double eps = tol::dual) const {
    return max_feasibility_violation <= eps && max_support_gap <= eps &&
           std::abs(primal_cost - dual_value) <= eps * (1.0 + std::abs(primal_cost));
  }
};

// Evaluates feasibility of the potentials on the tensor grid over the
// product of marginal ranges, the on-support gap, and primal/dual values.
// resolution == 0 picks the default: 33 per axis, reduced for large m so
// the grid stays under ~1.2e6 points.
DualityCertificate certify(const MonotoneCoupling& coupling,
                           const PathPotentials& potentials,
                           const Nonlinearity& spec, int resolution = 0);

// Off-range extension by inf-convolution over the product of the other
// components' table ranges (optional; certification does not need it).
double infconv_extension(const PathPotentials& potentials,
                         const Nonlinearity& spec, int i, double p_i,
                         int resolution = 33);

struct OracleResult {
  double min_cost = 0.0;
  std::vector<std::vector<int>> argmin;  // permutations for components 2..m
};

// Exhaustive search over permutation couplings of uniform marginals with a
// common atom count.  Bounds: n <= 6, m <= 4; refuses beyond them.
OracleResult brute_force_oracle(const std::vector<DiscreteMarginal>& marginals,
                                const Nonlinearity& spec);

// (u_1, ..., u_m) # (uniform mesh measure) of a monotone field.
MonotoneCoupling pushforward_coupling(const FieldBundle& field,
                                      const Orientation& orientation);

struct PushforwardReport {
  MonotoneCoupling pushforward;
  MonotoneCoupling monotone;
  double support_distance = 0.0;
  DualityCertificate certificate;
  bool coincides = false;
  bool pass = false;
};

// Checks that the pushforward coupling of a monotone field coincides with
// the simultaneous-quantile coupling of its marginals and that its duality
// certificate passes.
PushforwardReport verify_pushforward_optimality(const FieldBundle& field,
                                                const Nonlinearity& spec,
                                                const Orientation& orientation,
                                                double eps = tol::dual);

// Max over mass levels of the sup-norm distance between the two couplings'
// support tuples.
double support_distance(const MonotoneCoupling& a, const MonotoneCoupling& b);

// CSV: header "p1,...,pm,weight", one row per support tuple.
void write_coupling_csv_file(const std::string& path,
                             const MonotoneCoupling& coupling);

}  // namespace otsys

#endif  // OTSYS_MMOT_HPP_
