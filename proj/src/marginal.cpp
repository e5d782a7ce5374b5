#include "otsys/marginal.hpp"

#include <fstream>
#include <iomanip>
#include <numeric>

namespace otsys {

DiscreteMarginal::DiscreteMarginal(Vec atoms, Vec weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.empty()) throw std::invalid_argument("DiscreteMarginal: empty");
  if (atoms_.size() != weights_.size())
    throw std::invalid_argument("DiscreteMarginal: size mismatch");
  for (size_t i = 1; i < atoms_.size(); ++i)
    if (!(atoms_[i] > atoms_[i - 1]))
      throw std::invalid_argument("DiscreteMarginal: atoms not increasing");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0))
      throw std::invalid_argument("DiscreteMarginal: weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("DiscreteMarginal: weights must sum to 1");
  cum_.resize(weights_.size());
  std::partial_sum(weights_.begin(), weights_.end(), cum_.begin());
  cum_.back() = 1.0;
}

DiscreteMarginal DiscreteMarginal::from_samples(const Vec& values,
                                                const Vec& weights) {
  if (values.empty())
    throw std::invalid_argument("DiscreteMarginal::from_samples: empty input");
  Vec w = weights;
  if (w.empty()) {
    w.assign(values.size(), 1.0 / static_cast<double>(values.size()));
  } else if (w.size() != values.size()) {
    throw std::invalid_argument(
        "DiscreteMarginal::from_samples: weight size mismatch");
  }
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });

  Vec atoms, ws;
  for (size_t idx : order) {
    double v = values[idx], wt = w[idx];
    if (!(wt > 0.0))
      throw std::invalid_argument(
          "DiscreteMarginal::from_samples: weights must be positive");
    if (!atoms.empty() && v - atoms.back() <= 1e-14) {
      ws.back() += wt;
    } else {
      atoms.push_back(v);
      ws.push_back(wt);
    }
  }
  double total = std::accumulate(ws.begin(), ws.end(), 0.0);
  for (double& x : ws) x /= total;
  return DiscreteMarginal(std::move(atoms), std::move(ws));
}

double DiscreteMarginal::quantile(double t) const {
  if (t <= 0.0) return atoms_.front();
  if (t >= 1.0) return atoms_.back();
  // guard against last-bit drift when t was assembled from another cumsum
  auto it = std::lower_bound(cum_.begin(), cum_.end(), t - 1e-15);
  size_t k = static_cast<size_t>(it - cum_.begin());
  return atoms_[std::min(k, atoms_.size() - 1)];
}

DiscreteMarginal DiscreteMarginal::negated() const {
  Vec a(atoms_.rbegin(), atoms_.rend());
  for (double& x : a) x = -x;
  Vec w(weights_.rbegin(), weights_.rend());
  return DiscreteMarginal(std::move(a), std::move(w));
}

void write_marginal_csv(std::ostream& out, const DiscreteMarginal& marginal) {
  out << "atom,weight\n" << std::setprecision(17);
  for (int k = 0; k < marginal.size(); ++k)
    out << marginal.atoms()[k] << "," << marginal.weights()[k] << "\n";
}

void write_marginal_csv_file(const std::string& path,
                             const DiscreteMarginal& marginal) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  write_marginal_csv(out, marginal);
}

DiscreteMarginal read_marginal_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("marginal csv: missing header");
  Vec atoms, weights;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("marginal csv: expected atom,weight");
    atoms.push_back(std::stod(line.substr(0, comma)));
    weights.push_back(std::stod(line.substr(comma + 1)));
  }
  if (atoms.empty()) throw std::runtime_error("marginal csv: no rows");
  return DiscreteMarginal::from_samples(atoms, weights);
}

DiscreteMarginal read_marginal_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return read_marginal_csv(in);
}

double DiscreteMarginal::tv_distance(const DiscreteMarginal& a,
                                     const DiscreteMarginal& b,
                                     double atom_tol) {
  // Merge the two atom lists; weight mass landing on unmatched atoms counts
  // fully toward the distance.
  double tv = 0.0;
  size_t i = 0, j = 0;
  while (i < a.atoms_.size() || j < b.atoms_.size()) {
    if (j >= b.atoms_.size() ||
        (i < a.atoms_.size() && a.atoms_[i] < b.atoms_[j] - atom_tol)) {
      tv += a.weights_[i++];
    } else if (i >= a.atoms_.size() || b.atoms_[j] < a.atoms_[i] - atom_tol) {
      tv += b.weights_[j++];
    } else {
      tv += std::abs(a.weights_[i] - b.weights_[j]);
      ++i;
      ++j;
    }
  }
  return 0.5 * tv;
}

}  // namespace otsys
