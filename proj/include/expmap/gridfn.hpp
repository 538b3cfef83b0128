#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>

#include "expmap/random.hpp"

namespace expmap {

using Values = Eigen::ArrayXd;

/// Nondecreasing F : [0, L] -> [0, 1] sampled on n+1 uniform nodes x_k = k L / n.
///
/// Outside the domain F is extended by 0 on the left and by 1 on the right,
/// with linear interpolation in between nodes. The constructor enforces the
/// invariants exactly; use monotone_project() to repair rounding drift first.
class GridFunction {
 public:
  GridFunction(Values values, double domain_length = 1.0);

  static GridFunction zero(int intervals, double domain_length = 1.0);
  static GridFunction one(int intervals, double domain_length = 1.0);

  template <typename Fn>
  static GridFunction from_function(int intervals, double domain_length, Fn&& f) {
    Values v(intervals + 1);
    for (int k = 0; k <= intervals; ++k) v[k] = f(domain_length * k / intervals);
    return GridFunction(std::move(v), domain_length);
  }

  int intervals() const { return static_cast<int>(values_.size()) - 1; }
  double domain_length() const { return length_; }
  double step() const { return length_ / intervals(); }
  double node(int k) const { return length_ * k / intervals(); }
  const Values& values() const { return values_; }
  double operator[](int k) const { return values_[k]; }

  /// True when F(L) = 1, the right-endpoint convention preserved by T.
  bool right_pinned() const { return values_[intervals()] == 1.0; }

 private:
  Values values_;
  double length_;
};

bool same_grid(const GridFunction& f, const GridFunction& g);

/// Interpolated value with the 0 / 1 extension outside [0, L].
double eval(const GridFunction& f, double x);

/// Same as eval() for a raw nodal array that need not satisfy the invariants.
double eval_values(const Values& v, double domain_length, double x);

double sup_distance(const GridFunction& f, const GridFunction& g);
double l1_distance(const GridFunction& f, const GridFunction& g);

/// Trapezoid integral of nodal values over a uniform grid of spacing h.
double trapezoid(const Values& v, double h);

/// Running maximum followed by clamping to [0,1]. Inputs further than 1e-6
/// outside [0,1] are rejected since that much drift means an upstream bug.
GridFunction monotone_project(const Values& values, double domain_length = 1.0);

/// Generalized inverse inf{x : F(x) >= u} for u ~ U(0,1). Returns exactly 0
/// with probability F(0), so an atom at the origin is honored.
double sample_from(const GridFunction& f, Rng& rng);
double inverse_cdf(const GridFunction& f, double u);

/// CSV with header `x,F`, values printed with 17 significant digits.
void write_csv(std::ostream& os, const GridFunction& f);
GridFunction read_csv(std::istream& is);
void save_csv(const std::string& path, const GridFunction& f);
GridFunction load_csv(const std::string& path);

}  // namespace expmap
