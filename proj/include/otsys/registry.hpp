#ifndef OTSYS_REGISTRY_HPP_
#define OTSYS_REGISTRY_HPP_

#include <iosfwd>
#include <map>

#include "otsys/nonlinearity.hpp"

namespace otsys {

// Parsed form of a plain-text spec config (key = value lines).
// Recognized keys: name, m, seed, box_<i>_min, box_<i>_max (1-based i).
struct SpecConfig {
  std::string name;
  int m = 0;           // 0: use the registry default for the name
  std::uint64_t seed = 0;
  std::map<int, Interval> box_overrides;
};

SpecConfig parse_spec_config(std::istream& in);
SpecConfig parse_spec_config_file(const std::string& path);

// Built-in nonlinearities:
//   ac-quadratic       sum_{i!=j} |p_i-p_j|^2 + sum_i W(p_i),  W = (p^2-1)^2/4
//   ac-logsumexp       m log[(1/m) sum_i e^{W(p_i)}]
//   quadratic-coupling p_1^2 p_2^2 / 2  (m = 2)
//   pairwise-product   p_1 p_2 + p_2 p_3 + ... (all pairs; not orientable)
//   bilinear           p_1 p_2  (m = 2)
//   neg-bilinear       -p_1 p_2 (m = 2)
//   random-quadratic   p^T A p, A symmetric with seeded negative off-diagonal
std::vector<std::string> builtin_spec_names();
Nonlinearity make_spec(const SpecConfig& config);
Nonlinearity make_spec(const std::string& name, int m = 0,
                       std::uint64_t seed = 0);

// The scalar Allen-Cahn double well and its derivatives.
double allen_cahn_W(double p);
double allen_cahn_Wp(double p);
double allen_cahn_Wpp(double p);

}  // namespace otsys

#endif  // OTSYS_REGISTRY_HPP_
