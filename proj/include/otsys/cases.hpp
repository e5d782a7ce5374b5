#ifndef OTSYS_CASES_HPP_
#define OTSYS_CASES_HPP_

#include "otsys/decouple.hpp"
#include "otsys/registry.hpp"
#include "otsys/report.hpp"

namespace otsys {

// End-to-end verification pipelines for the three worked nonlinearities,
// wiring classification, the BVP solver, decoupling and the transport
// certificates together.  When out_dir is non-empty, profile and potential
// CSVs are written there.

// Quadratic-interaction Allen-Cahn system.  tanh(x/sqrt 2) profiles solve
// the coupled system; the decoupling recovers the scalar double well.
Report run_ac_quadratic(int m, double L = 10.0, int n = 401,
                        const std::string& out_dir = "");

// Log-sum-exp combination of Allen-Cahn wells; sign pattern picks the
// +-tanh branches.  Orientability is region-restricted (away from u_i = 0).
Report run_ac_logsumexp(int m, const std::vector<int>& signs, double L = 10.0,
                        int n = 401, const std::string& out_dir = "");

// Coupled quadratic system Delta u1 = u1 u2^2, Delta u2 = u1^2 u2 with a
// positive heteroclinic-type profile; verifies the explicit potentials,
// concavity/conjugacy of F_i(q) = 2 V_i(sqrt q) and the saturation identity.
Report run_quadratic_coupling(double L = 12.0, int n = 601,
                              std::pair<double, double> bc1 = {0.01, 3.0},
                              std::pair<double, double> bc2 = {3.0, 0.01},
                              const std::string& out_dir = "");

// Exact tanh field of the quadratic Allen-Cahn case on a mesh, all
// components equal, plus analytic nodal derivatives.
FieldBundle ac_exact_field(int m, const Mesh1D& mesh);
std::vector<Vec> ac_exact_derivatives(int m, const Mesh1D& mesh);

// Largest sub-mesh on which every component is strictly monotone, trimmed
// past any truncation-induced boundary sag, with a small safety margin.
FieldBundle trim_to_monotone_core(const FieldBundle& field,
                                  int safety_nodes = 5);

// Max over component pairs of the level-set correspondence defect: sorting
// nodes by u_i, the u_j sequence must be monotone; returns the largest
// wrong-direction jump (0 for exactly common level sets).
double common_level_set_defect(const FieldBundle& field);

}  // namespace otsys

#endif  // OTSYS_CASES_HPP_
