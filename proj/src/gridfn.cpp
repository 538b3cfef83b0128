#include "expmap/gridfn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "expmap/errors.hpp"

namespace expmap {

GridFunction::GridFunction(Values values, double domain_length)
    : values_(std::move(values)), length_(domain_length) {
  if (values_.size() < 2) throw DomainError("a grid function needs at least one interval");
  if (!(length_ > 0.0) || !std::isfinite(length_)) {
    throw DomainError("grid domain length must be positive and finite");
  }
  for (Eigen::Index k = 0; k < values_.size(); ++k) {
    if (!(values_[k] >= 0.0 && values_[k] <= 1.0)) {
      throw DomainError("grid function value outside [0,1] at node " + std::to_string(k));
    }
    if (k > 0 && values_[k] < values_[k - 1]) {
      throw DomainError("grid function decreases at node " + std::to_string(k));
    }
  }
}

GridFunction GridFunction::zero(int intervals, double domain_length) {
  return GridFunction(Values::Zero(intervals + 1), domain_length);
}

GridFunction GridFunction::one(int intervals, double domain_length) {
  return GridFunction(Values::Ones(intervals + 1), domain_length);
}

bool same_grid(const GridFunction& f, const GridFunction& g) {
  return f.intervals() == g.intervals() && f.domain_length() == g.domain_length();
}

namespace {

void require_same_grid(const GridFunction& f, const GridFunction& g) {
  if (!same_grid(f, g)) throw DomainError("grid functions live on different grids");
}

}  // namespace

double eval_values(const Values& v, double domain_length, double x) {
  if (x < 0.0) return 0.0;
  if (x > domain_length) return 1.0;
  const int n = static_cast<int>(v.size()) - 1;
  const double pos = x / domain_length * n;
  const int k = std::min(static_cast<int>(pos), n - 1);
  const double t = pos - k;
  return v[k] + t * (v[k + 1] - v[k]);
}

double eval(const GridFunction& f, double x) {
  return std::clamp(eval_values(f.values(), f.domain_length(), x), 0.0, 1.0);
}

double sup_distance(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  return (f.values() - g.values()).abs().maxCoeff();
}

double trapezoid(const Values& v, double h) {
  const Eigen::Index n = v.size();
  return h * (v.sum() - 0.5 * (v[0] + v[n - 1]));
}

double l1_distance(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  return trapezoid((f.values() - g.values()).abs(), f.step());
}

GridFunction monotone_project(const Values& values, double domain_length) {
  constexpr double kDrift = 1e-6;
  Values out(values.size());
  double running = -kDrift;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    const double v = values[k];
    if (!(v >= -kDrift && v <= 1.0 + kDrift)) {
      throw ConsistencyError("value " + std::to_string(v) + " at node " + std::to_string(k) +
                             " is outside [0,1] beyond rounding drift");
    }
    running = std::max(running, v);
    out[k] = std::clamp(running, 0.0, 1.0);
  }
  return GridFunction(std::move(out), domain_length);
}

double inverse_cdf(const GridFunction& f, double u) {
  const Values& v = f.values();
  if (u <= v[0]) return 0.0;
  const int n = f.intervals();
  if (u > v[n]) return f.domain_length();
  // First node with F_k >= u; F_{k-1} < u there, so the cell has positive rise.
  const auto* first = v.data();
  const int k = static_cast<int>(std::lower_bound(first, first + n + 1, u) - first);
  const double rise = v[k] - v[k - 1];
  const double t = (u - v[k - 1]) / rise;
  return f.node(k - 1) + std::clamp(t, 0.0, 1.0) * f.step();
}

double sample_from(const GridFunction& f, Rng& rng) { return inverse_cdf(f, uniform01(rng)); }

void write_csv(std::ostream& os, const GridFunction& f) {
  os << "x,F\n";
  os << std::setprecision(17);
  for (int k = 0; k <= f.intervals(); ++k) os << f.node(k) << ',' << f[k] << '\n';
}

GridFunction read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DomainError("empty grid function CSV");
  while (line.starts_with("#")) {
    if (!std::getline(is, line)) throw DomainError("empty grid function CSV");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,F") throw DomainError("grid function CSV must start with header x,F");
  std::vector<double> xs, fs;
  while (std::getline(is, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::istringstream row(line);
    double x = 0.0, v = 0.0;
    char comma = 0;
    if (!(row >> x >> comma >> v) || comma != ',') {
      throw DomainError("malformed grid function row '" + line + "'");
    }
    xs.push_back(x);
    fs.push_back(v);
  }
  if (xs.size() < 2 || xs.front() != 0.0) {
    throw DomainError("grid function CSV needs nodes starting at x=0");
  }
  const int n = static_cast<int>(xs.size()) - 1;
  const double length = xs.back();
  for (int k = 0; k <= n; ++k) {
    if (std::abs(xs[k] - length * k / n) > 1e-12 * std::max(1.0, length)) {
      throw DomainError("grid function CSV nodes are not uniform");
    }
  }
  return GridFunction(Eigen::Map<Values>(fs.data(), n + 1), length);
}

void save_csv(const std::string& path, const GridFunction& f) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write '" + path + "'");
  write_csv(out, f);
}

GridFunction load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  return read_csv(in);
}

}  // namespace expmap
