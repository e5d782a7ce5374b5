#ifndef OTSYS_NONLINEARITY_HPP_
#define OTSYS_NONLINEARITY_HPP_

#include <functional>
#include <optional>

#include "otsys/core.hpp"

namespace otsys {

// A C^2 nonlinearity H: R^m -> R together with its gradient, Hessian and a
// box domain.  The Hessian evaluator may be omitted; it is then synthesized
// by central differences of the gradient.
class Nonlinearity {
 public:
  using HFn = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;
  using HessFn = std::function<SquareMat(const Vec&)>;

  Nonlinearity() = default;
  Nonlinearity(std::string name, int m, Box domain, HFn h, GradFn grad,
               HessFn hess = nullptr);

  const std::string& name() const { return name_; }
  int m() const { return m_; }
  const Box& domain() const { return domain_; }

  double H(const Vec& p) const;
  Vec grad(const Vec& p) const;
  SquareMat hess(const Vec& p) const;

  bool has_analytic_hess() const { return static_cast<bool>(hess_); }

  // Same H and derivative structure on a replacement box.
  Nonlinearity with_domain(Box domain) const;

  // H(sigma_1 q_1, ..., sigma_m q_m) on the reflected box.
  Nonlinearity reflected(const std::vector<int>& sigma) const;

  // -H (used for anti-monotone checks).
  Nonlinearity negated() const;

 private:
  std::string name_;
  int m_ = 0;
  Box domain_;
  HFn h_;
  GradFn grad_;
  HessFn hess_;
};

// Finite set of evaluation points inside a box: a per-axis tensor grid or a
// seeded uniform sample.  Carries its provenance so reports stay auditable.
struct SampleGrid {
  std::vector<Vec> points;
  std::string strategy;  // "tensor" | "random"
  std::uint64_t seed = 0;
  int count_per_axis = 0;

  static SampleGrid tensor(const Box& box, int per_axis);
  static SampleGrid random(const Box& box, int count, std::uint64_t seed);
  // 16 per axis for m <= 4, else 4096 seeded points.
  static SampleGrid standard(const Box& box, std::uint64_t seed = kDefaultSeed);

  static constexpr std::uint64_t kDefaultSeed = 1771;
};

struct Orientation {
  std::vector<int> theta;  // entries in {-1, +1}

  int size() const { return static_cast<int>(theta.size()); }
  static Orientation ones(int m) { return {std::vector<int>(m, 1)}; }
};

enum class Verdict { pass, fail, degenerate };

struct Witness {
  Vec point;
  std::vector<int> indices;  // the offending pair or triple
  double value = 0.0;
};

struct OrientabilityResult {
  Verdict verdict = Verdict::fail;
  std::optional<Orientation> theta;
  std::optional<Witness> witness;

  bool orientable() const { return verdict == Verdict::pass; }
};

struct CompatibilityResult {
  Verdict verdict = Verdict::fail;
  bool vacuous = false;  // m == 2: no distinct triples exist
  std::optional<Witness> witness;

  bool compatible() const { return verdict == Verdict::pass; }
};

struct SubmodularityResult {
  Verdict verdict = Verdict::fail;
  std::optional<Witness> smooth_witness;     // H_ij >= -eps at a point
  std::optional<Witness> fourpoint_witness;  // discrete four-point violation

  bool submodular() const { return verdict == Verdict::pass; }
};

struct FlipResult {
  std::vector<int> sigma;  // sigma_1 = +1
  Nonlinearity flipped;
};

struct EquivalenceReport {
  OrientabilityResult orientability;
  CompatibilityResult compatibility;
  std::optional<std::vector<int>> sigma;
  std::optional<SubmodularityResult> submodularity_after_flip;
  bool consistent = false;  // the three verdicts agree
  bool all_pass = false;
};

// Definition: orientable iff some theta in {-1,+1}^m makes
// theta_i theta_j H_ij < 0 for all i != j on the grid.  The candidate is
// built from the signs of H_{1i} at the box center (theta_1 = +1,
// theta_i = +1 iff H_{1i} < 0) and then verified globally.
OrientabilityResult check_orientable(const Nonlinearity& spec,
                                     const SampleGrid& grid,
                                     double eps_sign = tol::sign);

// Compatible iff H_ij (H_kj)^{-1} H_ki < 0 for all distinct i,j,k on the
// grid.  For m == 2 the condition is vacuous and flagged as such.
CompatibilityResult check_compatible(const Nonlinearity& spec,
                                     const SampleGrid& grid,
                                     double eps_sign = tol::sign);

// Smooth criterion H_ij < 0 for i != j on the grid, plus the discrete
// four-point test with increments h, k in {1/4, 1/2, 1} * (box width / 4).
SubmodularityResult check_submodular(const Nonlinearity& spec,
                                     const SampleGrid& grid,
                                     double eps_sign = tol::sign,
                                     double eps_fourpoint = tol::fourpoint);

// Sign-flip change of variables q_i = sigma_i p_i with sigma_i = +1 when
// H_{1i} < 0 at the box center, making the transformed H submodular when
// the spec is orientable.  Throws when a reference sign is degenerate.
FlipResult flip_to_submodular(const Nonlinearity& spec,
                              double eps_sign = tol::sign);

// Runs all three classifiers and checks that their verdicts agree.
EquivalenceReport verify_equivalence(const Nonlinearity& spec,
                                     const SampleGrid& grid,
                                     double eps_sign = tol::sign);

// Type-invariant audit: Hessian symmetry (1e-8 relative) and agreement of
// the gradient with central differences of H at two step sizes.  Returns
// the worst relative defect seen.
struct SpecAudit {
  double hess_asymmetry = 0.0;
  double grad_defect = 0.0;
  bool ok = false;
};
SpecAudit audit_spec(const Nonlinearity& spec, const SampleGrid& grid);

}  // namespace otsys

#endif  // OTSYS_NONLINEARITY_HPP_
