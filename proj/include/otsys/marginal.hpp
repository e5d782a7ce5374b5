#ifndef OTSYS_MARGINAL_HPP_
#define OTSYS_MARGINAL_HPP_

#include <iosfwd>

#include "otsys/core.hpp"

namespace otsys {

// Discrete probability measure on R: strictly increasing atoms with
// positive weights summing to 1.
class DiscreteMarginal {
 public:
  DiscreteMarginal() = default;
  DiscreteMarginal(Vec atoms, Vec weights);

  // Sorts, merges duplicates (within 1e-14), normalizes the weights.
  // Default weights are uniform.
  static DiscreteMarginal from_samples(const Vec& values,
                                       const Vec& weights = {});

  const Vec& atoms() const { return atoms_; }
  const Vec& weights() const { return weights_; }
  // Cumulative weights; back() is forced to exactly 1.
  const Vec& cumulative() const { return cum_; }
  int size() const { return static_cast<int>(atoms_.size()); }

  double min() const { return atoms_.front(); }
  double max() const { return atoms_.back(); }

  // Left-continuous generalized inverse of the CDF: the smallest atom whose
  // cumulative weight reaches t.
  double quantile(double t) const;

  // Atoms negated and order reversed.
  DiscreteMarginal negated() const;

  // Total-variation distance after merging near-equal atoms.
  static double tv_distance(const DiscreteMarginal& a,
                            const DiscreteMarginal& b,
                            double atom_tol = 1e-12);

 private:
  Vec atoms_;
  Vec weights_;
  Vec cum_;
};

// CSV: header "atom,weight", one row per atom.
void write_marginal_csv(std::ostream& out, const DiscreteMarginal& marginal);
void write_marginal_csv_file(const std::string& path,
                             const DiscreteMarginal& marginal);
DiscreteMarginal read_marginal_csv(std::istream& in);
DiscreteMarginal read_marginal_csv_file(const std::string& path);

}  // namespace otsys

#endif  // OTSYS_MARGINAL_HPP_
