#ifndef OTSYS_BVP_HPP_
#define OTSYS_BVP_HPP_

#include <optional>

#include "otsys/field.hpp"
#include "otsys/nonlinearity.hpp"

namespace otsys {

struct SolveReport {
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  Vec residual_history;       // max-norm per iterate, starting at the guess
  std::vector<int> damping_history;  // halvings taken per Newton step
};

struct SolveOptions {
  double tolerance = tol::newton;
  int max_iterations = 50;
  int max_halvings = 30;
};

// Damped Newton for the two-point boundary value problem
//   (u_{k+1} - 2 u_k + u_{k-1})/h^2 = grad H(u_k)   at interior nodes,
// with Dirichlet data per component.  The Jacobian is block tridiagonal
// with m x m blocks and is solved by block Thomas elimination.
std::pair<FieldBundle, SolveReport> solve_system_bvp(
    const Nonlinearity& spec, const Mesh1D& mesh,
    const std::vector<std::pair<double, double>>& boundary,
    const std::optional<FieldBundle>& initial_guess = std::nullopt,
    const SolveOptions& options = {});

// Scalar specialization: Delta u = Vp(u).  Vpp may be omitted (central
// difference of Vp is used for the Newton blocks).
std::pair<Vec, SolveReport> solve_scalar_bvp(
    const std::function<double(double)>& Vp, const Mesh1D& mesh,
    std::pair<double, double> boundary,
    const std::optional<Vec>& initial_guess = std::nullopt,
    const std::function<double(double)>& Vpp = nullptr,
    const SolveOptions& options = {});

// Interior max-norm of the centered-difference residual of a field.
double system_residual(const FieldBundle& field, const Nonlinearity& spec);

enum class Monotonicity { increasing, decreasing, non_monotone };

struct MonotoneVerdict {
  Monotonicity kind = Monotonicity::non_monotone;
  int witness_node = -1;  // first offending forward difference

  bool monotone() const { return kind != Monotonicity::non_monotone; }
};

// Per-component verdicts from forward differences.  Interior differences
// must clear the strictness margin; the two boundary-adjacent differences
// only need the right sign to within the margin (truncated heteroclinics
// flatten near the ends).
std::vector<MonotoneVerdict> check_monotone(const FieldBundle& field,
                                            double eps_mono = tol::mono);

enum class HMonotoneKind { h_monotone, anti_h_monotone, violated };

struct HMonotoneVerdict {
  HMonotoneKind kind = HMonotoneKind::violated;
  int witness_node = -1;
  std::pair<int, int> witness_pair = {-1, -1};

  bool h_monotone() const { return kind == HMonotoneKind::h_monotone; }
};

// Sign of H_ij(u) * du_i * du_j at every forward difference, all i != j.
// All negative: H-monotone.  All positive: (-H)-monotone.  Pairs where a
// difference is below the flatness margin are skipped.
HMonotoneVerdict check_H_monotone(const FieldBundle& field,
                                  const Nonlinearity& spec,
                                  double eps_mono = tol::mono);

// Component directions as an Orientation (+1 increasing, -1 decreasing).
Orientation field_directions(const FieldBundle& field);

}  // namespace otsys

#endif  // OTSYS_BVP_HPP_
