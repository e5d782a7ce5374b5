#ifndef OTSYS_POTENTIALS_HPP_
#define OTSYS_POTENTIALS_HPP_

#include <memory>

#include "otsys/nonlinearity.hpp"

namespace otsys {

// One component's potential table: strictly increasing p-grid with values
// V and derivatives V' = dH/dp_i along the generating curve.  Evaluation is
// piecewise linear, clamped to the end values outside the grid.
struct PotentialTable {
  Vec knots;
  Vec values;
  Vec derivs;

  double lo() const { return knots.front(); }
  double hi() const { return knots.back(); }
  bool single_point() const { return knots.size() == 1; }
  double value(double p) const { return pl_interp(knots, values, p); }
  double deriv(double p) const { return pl_interp(knots, derivs, p); }
  double min_value() const {
    return *std::min_element(values.begin(), values.end());
  }
};

struct PotentialBuildOptions {
  double refine_density = 32768.0;  // target knots across each range
  size_t max_total_knots = 600000;
  int anchor_vertex = 0;  // gauge: sum_i V_i = H at this path vertex
};

// Potentials V_i obtained by integrating dV_i = dH/dp_i along a monotone
// piecewise-linear curve in R^m (a coupling's support path, or a monotone
// solution's image).  Each inter-vertex segment is refined and integrated
// with Gauss-Legendre so the identity sum_i V_i = H holds along the curve
// to rounding accuracy; knot spacing is kept fine enough that piecewise-
// linear evaluation stays within the duality tolerances.
class PathPotentials {
 public:
  using BuildOptions = PotentialBuildOptions;

  static PathPotentials build(std::vector<Vec> vertices,
                              const Nonlinearity& spec,
                              const BuildOptions& options = {});

  int m() const { return static_cast<int>(tables_.size()); }
  const PotentialTable& table(int i) const { return tables_[i]; }

  double value(int i, double p) const { return tables_[i].value(p); }
  double deriv(int i, double p) const { return tables_[i].deriv(p); }
  double sum_values(const Vec& p) const;

  // Quadrature evaluation from the nearest path vertex; bypasses the
  // piecewise-linear tables.  Used by checks that need values below the
  // interpolation error floor.
  double value_exact(int i, double p) const;

  // Additive gauge shift of one component.
  void shift(int i, double c);

  const std::vector<Vec>& vertices() const { return vertices_; }
  int anchor_vertex() const { return anchor_; }
  double anchor_discrepancy() const { return anchor_shift_; }

 private:
  struct CompSegment {
    int seg = 0;         // path segment index
    double p_a = 0.0;    // component coordinate at segment start/end
    double p_b = 0.0;
    double v_a = 0.0;    // accumulated V at segment start (pre-shift)
  };

  std::vector<Vec> vertices_;
  std::vector<PotentialTable> tables_;
  std::vector<std::vector<CompSegment>> comp_segments_;
  std::vector<double> shifts_;
  std::shared_ptr<const Nonlinearity> spec_;
  int anchor_ = 0;
  double anchor_shift_ = 0.0;
};

}  // namespace otsys

#endif  // OTSYS_POTENTIALS_HPP_
