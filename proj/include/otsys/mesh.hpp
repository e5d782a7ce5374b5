#ifndef OTSYS_MESH_HPP_
#define OTSYS_MESH_HPP_

#include "otsys/core.hpp"

namespace otsys {

// Uniform 1D mesh with n nodes on [lo, hi].
struct Mesh1D {
  double lo = 0.0;
  double hi = 1.0;
  int n = 0;

  Mesh1D() = default;
  Mesh1D(double lo_, double hi_, int n_) : lo(lo_), hi(hi_), n(n_) {
    if (n < 3) throw std::invalid_argument("Mesh1D: need n >= 3");
    if (!(hi > lo)) throw std::invalid_argument("Mesh1D: need hi > lo");
  }

  double h() const { return (hi - lo) / (n - 1); }
  double node(int k) const { return lo + k * h(); }
  Vec nodes() const {
    Vec x(n);
    for (int k = 0; k < n; ++k) x[k] = node(k);
    return x;
  }
};

}  // namespace otsys

#endif  // OTSYS_MESH_HPP_
