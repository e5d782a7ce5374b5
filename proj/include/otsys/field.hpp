#ifndef OTSYS_FIELD_HPP_
#define OTSYS_FIELD_HPP_

#include <iosfwd>
#include <utility>

#include "otsys/mesh.hpp"

namespace otsys {

// m solution components sampled on a common 1D mesh, with Dirichlet data.
// Boundary values equal the first/last nodal values exactly.
struct FieldBundle {
  Mesh1D mesh;
  std::vector<Vec> components;                     // m arrays of size mesh.n
  std::vector<std::pair<double, double>> boundary; // (a_i, b_i) per component

  int m() const { return static_cast<int>(components.size()); }

  void validate() const;

  // Nodal tuple (u_1(x_k), ..., u_m(x_k)).
  Vec at(int k) const;

  // Sub-mesh restriction to node range [k_lo, k_hi], boundary refreshed.
  FieldBundle restrict_nodes(int k_lo, int k_hi) const;

  static FieldBundle linear(const Mesh1D& mesh,
                            const std::vector<std::pair<double, double>>& bc);

  // Plateau / central ramp / plateau between the boundary values; a robust
  // starting shape for heteroclinic-type profiles (a straight line across a
  // wide interval tends to strand Newton at a merit-function minimum).
  static FieldBundle ramp(const Mesh1D& mesh,
                          const std::vector<std::pair<double, double>>& bc,
                          double ramp_fraction = 0.25);
};

// CSV: header "x,u1,...,um", one row per node, 17 significant digits.
void write_field_csv(std::ostream& out, const FieldBundle& field);
void write_field_csv_file(const std::string& path, const FieldBundle& field);
FieldBundle read_field_csv(std::istream& in);
FieldBundle read_field_csv_file(const std::string& path);

}  // namespace otsys

#endif  // OTSYS_FIELD_HPP_
