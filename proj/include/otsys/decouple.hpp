#ifndef OTSYS_DECOUPLE_HPP_
#define OTSYS_DECOUPLE_HPP_

#include "otsys/bvp.hpp"
#include "otsys/potentials.hpp"

namespace otsys {

struct GaugeRecord {
  int base_node = 0;         // mesh node standing in for x_N = 0
  double joint_shift = 0.0;  // discrepancy assigned to V_1 at the base point
};

// Potentials V_i with V_i'(p_i) = dH/dp_i(u(x(p_i))) along a monotone 1D
// solution, turning Delta u = grad H(u) into m scalar equations.
struct DecouplingPotentials {
  PathPotentials potentials;
  GaugeRecord gauge;
  Orientation directions;        // per-component monotonicity of the source
  double source_residual = 0.0;  // coupled residual of the generating field

  const PotentialTable& table(int i) const { return potentials.table(i); }
  double value(int i, double p) const { return potentials.value(i, p); }
  double deriv(int i, double p) const { return potentials.deriv(i, p); }
};

struct DecoupleOptions {
  double refine_density = 32768.0;
  double residual_warn = 1e-6;  // above this the source is not a solution
};

// Inverts x -> u_i(x) through the nodal values, tabulates V_i' = dH/dp_i
// along the solution and integrates; constants are fixed so that
// sum_i V_i(u_i(x_base)) = H(u(x_base)) at the mesh midpoint node.
DecouplingPotentials build_decoupling(const FieldBundle& field,
                                      const Nonlinearity& spec,
                                      const DecoupleOptions& options = {});

// max_k | sum_i V_i(u_i(x_k)) - H(u(x_k)) |
double verify_on_solution_identity(const FieldBundle& field,
                                   const DecouplingPotentials& dec,
                                   const Nonlinearity& spec);

enum class InequalitySense { less_equal, greater_equal };

struct GlobalInequalityReport {
  InequalitySense sense = InequalitySense::less_equal;
  double max_violation = 0.0;  // against the declared sense
  int resolution = 0;

  bool pass(double eps = tol::decouple) const { return max_violation <= eps; }
};

// sum_i V_i(p_i) <= H(p) on the product of component ranges for H-monotone
// sources; the reversed inequality for (-H)-monotone sources.  Refuses when
// the source is neither.
GlobalInequalityReport verify_global_inequality(const FieldBundle& field,
                                                const DecouplingPotentials& dec,
                                                const Nonlinearity& spec,
                                                int resolution = 0);

// max over interior nodes of |Delta_h u_i - V_i'(u_i)|.
double verify_decoupled_pde(const FieldBundle& field,
                            const DecouplingPotentials& dec);

struct ModicaReport {
  Vec lhs;  // 1/2 sum_i |u_i'|^2 per node
  Vec rhs;  // H(u) - sum_i Vbar_i per node
  double max_violation = 0.0;  // max(lhs - rhs)
  Vec v_min;                   // Vbar_i = min over each table
  Vec C;                       // C_i = V_i(u_i at the right endpoint)
  double first_integral_gap = 0.0;   // 1D refinement residual
  double limit_identity_gap = 0.0;   // |sum C_i - H(u(right end))|
  bool H_nonnegative_on_range = false;
  double nonneg_modica_violation = 0.0;  // max(lhs - H(u)) when H >= 0
  double fd_margin = 0.0;   // derivative-noise floor (0 with analytic input)
  bool applicable = false;  // solution with a non-degenerate potential
  std::optional<bool> pass;  // engaged only when applicable
};

// Pointwise Modica estimate 1/2 sum |u_i'|^2 <= H(u) - sum Vbar_i, the 1D
// first-integral refinement with constants C_i, and the potential-free
// bound when H >= 0 on the range product.  Gradients use the supplied
// analytic nodal derivatives when given, else finite differences.
ModicaReport modica_check(
    const FieldBundle& field, const DecouplingPotentials& dec,
    const Nonlinearity& spec,
    const std::optional<std::vector<Vec>>& derivatives = std::nullopt,
    double eps = tol::decouple);

// CSV per component: columns p,V,Vprime (knot rows).
void write_potentials_csv_file(const std::string& path_prefix,
                               const DecouplingPotentials& dec,
                               size_t max_rows_per_component = 8192);

}  // namespace otsys

#endif  // OTSYS_DECOUPLE_HPP_
