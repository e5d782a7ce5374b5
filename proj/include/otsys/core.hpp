#ifndef OTSYS_CORE_HPP_
#define OTSYS_CORE_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace otsys {

using Vec = std::vector<double>;

// Dense square matrix, row-major.  Sized for the component count m of a
// nonlinearity (small: m is typically 2..5), not for mesh-sized systems.
struct SquareMat {
  int n = 0;
  Vec a;

  SquareMat() = default;
  explicit SquareMat(int size) : n(size), a(static_cast<size_t>(size) * size, 0.0) {}

  double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
  bool contains(double x, double slack = 0.0) const {
    return x >= lo - slack && x <= hi + slack;
  }
};

// Product of closed intervals; the set Omega the classifiers quantify over.
using Box = std::vector<Interval>;

inline bool box_contains(const Box& box, const Vec& p, double slack = 0.0) {
  if (box.size() != p.size()) return false;
  for (size_t i = 0; i < p.size(); ++i)
    if (!box[i].contains(p[i], slack)) return false;
  return true;
}

inline Vec box_center(const Box& box) {
  Vec c(box.size());
  for (size_t i = 0; i < box.size(); ++i) c[i] = box[i].center();
  return c;
}

// Default tolerances.  Overridable per call where an operation takes an
// explicit epsilon; these are the library-wide defaults.
namespace tol {
inline constexpr double sign = 1e-10;       // strict-sign margin for classifiers
inline constexpr double fourpoint = 1e-12;  // discrete submodularity slack
inline constexpr double dual = 1e-8;        // duality certificate checks
inline constexpr double newton = 1e-10;     // BVP residual max-norm
inline constexpr double mono = 1e-12;       // strict monotonicity margin
inline constexpr double decouple = 1e-6;    // decoupling verifications
inline constexpr double rearr = 1e-6;       // rearrangement energy checks
inline constexpr double conj = 1e-3;        // Legendre conjugacy gap
}  // namespace tol

// 4-point Gauss-Legendre rule on [0,1].  Exact through degree 7, which
// covers the polynomial nonlinearities exactly along linear path segments.
struct GaussLegendre4 {
  static constexpr std::array<double, 4> x = {
      0.06943184420297371, 0.33000947820757187,
      0.66999052179242813, 0.93056815579702629};
  static constexpr std::array<double, 4> w = {
      0.17392742256872693, 0.32607257743127307,
      0.32607257743127307, 0.17392742256872693};
};

// Piecewise-linear interpolation over a sorted knot grid, clamped to the
// end values outside of it.
inline double pl_interp(const Vec& knots, const Vec& values, double x) {
  if (knots.empty()) throw std::invalid_argument("pl_interp: empty table");
  if (knots.size() == 1 || x <= knots.front()) return values.front();
  if (x >= knots.back()) return values.back();
  auto it = std::upper_bound(knots.begin(), knots.end(), x);
  size_t k = static_cast<size_t>(it - knots.begin());
  double t = (x - knots[k - 1]) / (knots[k] - knots[k - 1]);
  return values[k - 1] + t * (values[k] - values[k - 1]);
}

// Trapezoid quadrature weight of node k on an n-node uniform mesh.
inline double trapezoid_weight(int k, int n, double h) {
  return (k == 0 || k == n - 1) ? 0.5 * h : h;
}

inline double max_abs(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace otsys

#endif  // OTSYS_CORE_HPP_
