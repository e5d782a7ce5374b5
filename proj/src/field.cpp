#include "otsys/field.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace otsys {

void FieldBundle::validate() const {
  if (components.empty())
    throw std::invalid_argument("FieldBundle: no components");
  if (boundary.size() != components.size())
    throw std::invalid_argument("FieldBundle: boundary size mismatch");
  for (size_t i = 0; i < components.size(); ++i) {
    if (static_cast<int>(components[i].size()) != mesh.n)
      throw std::invalid_argument("FieldBundle: component size != mesh.n");
    if (components[i].front() != boundary[i].first ||
        components[i].back() != boundary[i].second)
      throw std::invalid_argument(
          "FieldBundle: boundary values must equal end nodal values");
  }
}

Vec FieldBundle::at(int k) const {
  Vec p(components.size());
  for (size_t i = 0; i < components.size(); ++i) p[i] = components[i][k];
  return p;
}

FieldBundle FieldBundle::restrict_nodes(int k_lo, int k_hi) const {
  if (k_lo < 0 || k_hi >= mesh.n || k_hi - k_lo + 1 < 3)
    throw std::invalid_argument("FieldBundle::restrict_nodes: bad range");
  FieldBundle out;
  out.mesh = Mesh1D(mesh.node(k_lo), mesh.node(k_hi), k_hi - k_lo + 1);
  for (const Vec& c : components)
    out.components.emplace_back(c.begin() + k_lo, c.begin() + k_hi + 1);
  for (const Vec& c : out.components)
    out.boundary.emplace_back(c.front(), c.back());
  return out;
}

FieldBundle FieldBundle::linear(
    const Mesh1D& mesh, const std::vector<std::pair<double, double>>& bc) {
  FieldBundle f;
  f.mesh = mesh;
  f.boundary = bc;
  for (const auto& [a, b] : bc) {
    Vec c(mesh.n);
    for (int k = 0; k < mesh.n; ++k)
      c[k] = a + (b - a) * k / static_cast<double>(mesh.n - 1);
    c.front() = a;
    c.back() = b;
    f.components.push_back(std::move(c));
  }
  return f;
}

FieldBundle FieldBundle::ramp(const Mesh1D& mesh,
                              const std::vector<std::pair<double, double>>& bc,
                              double ramp_fraction) {
  FieldBundle f;
  f.mesh = mesh;
  f.boundary = bc;
  const double mid = 0.5 * (mesh.lo + mesh.hi);
  const double half = 0.5 * ramp_fraction * (mesh.hi - mesh.lo);
  for (const auto& [a, b] : bc) {
    Vec c(mesh.n);
    for (int k = 0; k < mesh.n; ++k) {
      double t = std::clamp((mesh.node(k) - mid + half) / (2.0 * half), 0.0, 1.0);
      c[k] = a + (b - a) * t;
    }
    c.front() = a;
    c.back() = b;
    f.components.push_back(std::move(c));
  }
  return f;
}

void write_field_csv(std::ostream& out, const FieldBundle& field) {
  out << "x";
  for (int i = 0; i < field.m(); ++i) out << ",u" << (i + 1);
  out << "\n";
  out << std::setprecision(17);
  for (int k = 0; k < field.mesh.n; ++k) {
    out << field.mesh.node(k);
    for (int i = 0; i < field.m(); ++i) out << "," << field.components[i][k];
    out << "\n";
  }
}

void write_field_csv_file(const std::string& path, const FieldBundle& field) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  write_field_csv(out, field);
}

FieldBundle read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("field csv: missing header");
  int cols = 1 + static_cast<int>(std::count(line.begin(), line.end(), ','));
  if (cols < 2) throw std::runtime_error("field csv: need x plus components");
  int m = cols - 1;

  Vec xs;
  std::vector<Vec> comps(m);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    for (int c = 0; c < cols; ++c) {
      if (!std::getline(row, cell, ','))
        throw std::runtime_error("field csv: short row");
      double v = std::stod(cell);
      if (c == 0)
        xs.push_back(v);
      else
        comps[c - 1].push_back(v);
    }
  }
  if (xs.size() < 3) throw std::runtime_error("field csv: need >= 3 rows");
  double h0 = xs[1] - xs[0];
  for (size_t k = 1; k < xs.size(); ++k) {
    double hk = xs[k] - xs[k - 1];
    if (std::abs(hk - h0) > 1e-9 * std::max(1.0, std::abs(h0)))
      throw std::runtime_error("field csv: mesh must be uniform");
  }
  FieldBundle f;
  f.mesh = Mesh1D(xs.front(), xs.back(), static_cast<int>(xs.size()));
  f.components = std::move(comps);
  for (const Vec& c : f.components) f.boundary.emplace_back(c.front(), c.back());
  return f;
}

FieldBundle read_field_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return read_field_csv(in);
}

}  // namespace otsys
