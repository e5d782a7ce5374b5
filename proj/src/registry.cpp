#include "otsys/registry.hpp"

#include <fstream>
#include <memory>
#include <random>
#include <sstream>

namespace otsys {

double allen_cahn_W(double p) {
  double s = p * p - 1.0;
  return 0.25 * s * s;
}
double allen_cahn_Wp(double p) { return p * (p * p - 1.0); }
double allen_cahn_Wpp(double p) { return 3.0 * p * p - 1.0; }

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

Box uniform_box(int m, double lo, double hi) {
  return Box(m, Interval{lo, hi});
}

// sum over pairs counted once, so that H_ij = -2 and the coupled system
// reads Delta u_i = 2(m-1) u_i - 2 sum_{j != i} u_j + W'(u_i)
Nonlinearity ac_quadratic(int m, Box box) {
  auto h = [m](const Vec& p) {
    double v = 0.0;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) v += (p[i] - p[j]) * (p[i] - p[j]);
      v += allen_cahn_W(p[i]);
    }
    return v;
  };
  auto grad = [m](const Vec& p) {
    Vec g(m);
    double sum = 0.0;
    for (double x : p) sum += x;
    for (int i = 0; i < m; ++i)
      g[i] = 2.0 * (m * p[i] - sum) + allen_cahn_Wp(p[i]);
    return g;
  };
  auto hess = [m](const Vec& p) {
    SquareMat h(m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) h.at(i, j) = -2.0;
      h.at(i, i) = 2.0 * (m - 1) + allen_cahn_Wpp(p[i]);
    }
    return h;
  };
  return Nonlinearity("ac-quadratic", m, std::move(box), h, grad, hess);
}

Nonlinearity ac_logsumexp(int m, Box box) {
  auto h = [m](const Vec& p) {
    double s = 0.0;
    for (double x : p) s += std::exp(allen_cahn_W(x));
    return m * std::log(s / m);
  };
  auto grad = [m](const Vec& p) {
    double s = 0.0;
    Vec e(m);
    for (int i = 0; i < m; ++i) {
      e[i] = std::exp(allen_cahn_W(p[i]));
      s += e[i];
    }
    Vec g(m);
    for (int i = 0; i < m; ++i) g[i] = m * e[i] * allen_cahn_Wp(p[i]) / s;
    return g;
  };
  auto hess = [m](const Vec& p) {
    double s = 0.0;
    Vec e(m), wp(m);
    for (int i = 0; i < m; ++i) {
      e[i] = std::exp(allen_cahn_W(p[i]));
      wp[i] = allen_cahn_Wp(p[i]);
      s += e[i];
    }
    SquareMat h(m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j)
        h.at(i, j) = -m * e[i] * wp[i] * e[j] * wp[j] / (s * s);
      h.at(i, i) = m * e[i] *
                   ((allen_cahn_Wpp(p[i]) + wp[i] * wp[i]) * s -
                    e[i] * wp[i] * wp[i]) /
                   (s * s);
    }
    return h;
  };
  return Nonlinearity("ac-logsumexp", m, std::move(box), h, grad, hess);
}

Nonlinearity quadratic_coupling(Box box) {
  auto h = [](const Vec& p) { return 0.5 * p[0] * p[0] * p[1] * p[1]; };
  auto grad = [](const Vec& p) {
    return Vec{p[0] * p[1] * p[1], p[0] * p[0] * p[1]};
  };
  auto hess = [](const Vec& p) {
    SquareMat h(2);
    h.at(0, 0) = p[1] * p[1];
    h.at(0, 1) = h.at(1, 0) = 2.0 * p[0] * p[1];
    h.at(1, 1) = p[0] * p[0];
    return h;
  };
  return Nonlinearity("quadratic-coupling", 2, std::move(box), h, grad, hess);
}

Nonlinearity pairwise_product(int m, Box box) {
  auto h = [m](const Vec& p) {
    double v = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) v += p[i] * p[j];
    return v;
  };
  auto grad = [m](const Vec& p) {
    double sum = 0.0;
    for (double x : p) sum += x;
    Vec g(m);
    for (int i = 0; i < m; ++i) g[i] = sum - p[i];
    return g;
  };
  auto hess = [m](const Vec&) {
    SquareMat h(m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) h.at(i, j) = i == j ? 0.0 : 1.0;
    return h;
  };
  return Nonlinearity("pairwise-product", m, std::move(box), h, grad, hess);
}

Nonlinearity bilinear(double sign, std::string name, Box box) {
  auto h = [sign](const Vec& p) { return sign * p[0] * p[1]; };
  auto grad = [sign](const Vec& p) { return Vec{sign * p[1], sign * p[0]}; };
  auto hess = [sign](const Vec&) {
    SquareMat h(2);
    h.at(0, 1) = h.at(1, 0) = sign;
    return h;
  };
  return Nonlinearity(std::move(name), 2, std::move(box), h, grad, hess);
}

Nonlinearity random_quadratic(int m, std::uint64_t seed, Box box) {
  // p^T A p with symmetric A; off-diagonal entries drawn negative so the
  // result is submodular (hence orientable with theta = 1).
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> off(-2.0, -0.5);
  std::uniform_real_distribution<double> diag(0.5, 3.0);
  auto A = std::make_shared<SquareMat>(m);
  for (int i = 0; i < m; ++i) {
    A->at(i, i) = diag(rng);
    for (int j = i + 1; j < m; ++j) A->at(i, j) = A->at(j, i) = off(rng);
  }
  auto h = [A, m](const Vec& p) {
    double v = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) v += p[i] * A->at(i, j) * p[j];
    return v;
  };
  auto grad = [A, m](const Vec& p) {
    Vec g(m, 0.0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) g[i] += 2.0 * A->at(i, j) * p[j];
    return g;
  };
  auto hess = [A, m](const Vec&) {
    SquareMat h(m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) h.at(i, j) = 2.0 * A->at(i, j);
    return h;
  };
  return Nonlinearity("random-quadratic", m, std::move(box), h, grad, hess);
}

struct Defaults {
  int m;
  double lo, hi;
};

const std::map<std::string, Defaults>& defaults() {
  static const std::map<std::string, Defaults> d = {
      {"ac-quadratic", {3, -1.0, 1.0}},
      {"ac-logsumexp", {3, 0.1, 0.9}},
      {"quadratic-coupling", {2, 0.01, 3.0}},
      {"pairwise-product", {3, 0.0, 1.0}},
      {"bilinear", {2, 1.0, 2.0}},
      {"neg-bilinear", {2, 1.0, 2.0}},
      {"random-quadratic", {3, -1.0, 1.0}},
  };
  return d;
}

}  // namespace

std::vector<std::string> builtin_spec_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : defaults()) names.push_back(k);
  return names;
}

SpecConfig parse_spec_config(std::istream& in) {
  SpecConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("spec config line " + std::to_string(lineno) +
                               ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    try {
      if (key == "name") {
        cfg.name = val;
      } else if (key == "m") {
        cfg.m = std::stoi(val);
      } else if (key == "seed") {
        cfg.seed = std::stoull(val);
      } else if (key.rfind("box_", 0) == 0) {
        size_t us = key.find('_', 4);
        if (us == std::string::npos) throw std::runtime_error("bad box key");
        int axis = std::stoi(key.substr(4, us - 4));
        std::string which = key.substr(us + 1);
        auto& iv = cfg.box_overrides[axis];
        if (which == "min")
          iv.lo = std::stod(val);
        else if (which == "max")
          iv.hi = std::stod(val);
        else
          throw std::runtime_error("bad box key");
      } else {
        throw std::runtime_error("unknown key '" + key + "'");
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("spec config line " + std::to_string(lineno) +
                               ": " + e.what());
    }
  }
  if (cfg.name.empty())
    throw std::runtime_error("spec config: missing 'name'");
  return cfg;
}

SpecConfig parse_spec_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec config: " + path);
  return parse_spec_config(in);
}

Nonlinearity make_spec(const SpecConfig& config) {
  auto it = defaults().find(config.name);
  if (it == defaults().end())
    throw std::runtime_error("unknown spec name: " + config.name);
  const Defaults& d = it->second;
  int m = config.m > 0 ? config.m : d.m;
  if ((config.name == "quadratic-coupling" || config.name == "bilinear" ||
       config.name == "neg-bilinear") &&
      m != 2)
    throw std::runtime_error(config.name + " is defined for m = 2 only");
  if (m < 2) throw std::runtime_error("spec requires m >= 2");

  Box box = uniform_box(m, d.lo, d.hi);
  // quadratic-coupling has an asymmetric default box (u1 up, u2 down share it)
  for (const auto& [axis, iv] : config.box_overrides) {
    if (axis < 1 || axis > m)
      throw std::runtime_error("box override axis out of range");
    if (!(iv.hi > iv.lo))
      throw std::runtime_error("box override must have max > min");
    box[axis - 1] = iv;
  }

  if (config.name == "ac-quadratic") return ac_quadratic(m, std::move(box));
  if (config.name == "ac-logsumexp") return ac_logsumexp(m, std::move(box));
  if (config.name == "quadratic-coupling")
    return quadratic_coupling(std::move(box));
  if (config.name == "pairwise-product")
    return pairwise_product(m, std::move(box));
  if (config.name == "bilinear") return bilinear(1.0, "bilinear", std::move(box));
  if (config.name == "neg-bilinear")
    return bilinear(-1.0, "neg-bilinear", std::move(box));
  if (config.name == "random-quadratic")
    return random_quadratic(m, config.seed, std::move(box));
  throw std::runtime_error("unknown spec name: " + config.name);
}

Nonlinearity make_spec(const std::string& name, int m, std::uint64_t seed) {
  SpecConfig cfg;
  cfg.name = name;
  cfg.m = m;
  cfg.seed = seed;
  return make_spec(cfg);
}

}  // namespace otsys
