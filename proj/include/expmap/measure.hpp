#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "expmap/random.hpp"

namespace expmap {

/// Default number of trapezoid intervals used for density quadrature.
inline constexpr int kDefaultIntervals = 2048;

/// Exponential tails are cut where the remaining mass drops below this.
inline constexpr double kExponentialTailMass = 1e-12;

struct Atom {
  double location;
  double weight;
};

/// Probability measure mu driving the convolution Phi_mu.
///
/// Four families are supported: finitely many atoms in [0,1), the uniform
/// density on [0,1], the rate-a exponential on [0,inf) and a piecewise-linear
/// tabulated density on [0,1]. Instances are immutable after construction.
class Measure {
 public:
  enum class Kind { FiniteAtomic, UniformDensity, ExponentialRate, TabulatedDensity };

  static Measure uniform();
  static Measure exponential(double rate);
  static Measure dirac(double location);
  /// Weights must sum to 1 within 1e-9; they are renormalized exactly.
  static Measure atoms(std::vector<Atom> atoms);
  /// Piecewise-linear density through (nodes[i], values[i]), zero outside the
  /// node range. Mass within 1e-6 of 1 is renormalized, otherwise rejected.
  static Measure tabulated(std::vector<double> nodes, std::vector<double> values);
  /// CSV with header `x,density`.
  static Measure load_table(const std::string& path);

  /// Mini-grammar: `uniform` | `exp:a=<f>` | `dirac:t=<f>` |
  /// `atoms:<w1>@<x1>,<w2>@<x2>,...` | `table:<path>`.
  static Measure parse(std::string_view spec);

  Kind kind() const { return kind_; }
  const std::vector<Atom>& atom_list() const { return atoms_; }
  double rate() const { return rate_; }
  bool has_atoms() const { return kind_ == Kind::FiniteAtomic; }
  bool is_unbounded() const { return kind_ == Kind::ExponentialRate; }

  /// Right end of the support interval (1, or +inf for the exponential).
  double support_end() const;
  /// Length of the grid domain used to represent functions for this measure:
  /// 1 for measures on [0,1], -ln(1e-12)/a for the exponential.
  double grid_domain() const;

  /// Density at z (0 for atomic measures).
  double density(double z) const;
  /// mu([0, x]).
  double cdf(double x) const;
  /// mu([x, end]).
  double tail_mass(double x) const;

  /// Integral of g over the closed interval [lo, hi] against mu. Atoms
  /// sitting exactly on lo or hi are included; densities use a composite
  /// trapezoid with `intervals` cells (hi may be +inf for the exponential).
  double integrate_against(const std::function<double(double)>& g, double lo, double hi,
                           int intervals = kDefaultIntervals) const;

  double sample(Rng& rng) const;

  /// Round-trips through parse() except for tables, which report their path.
  const std::string& spec() const { return spec_; }

  const std::vector<double>& table_nodes() const { return table_x_; }
  const std::vector<double>& table_values() const { return table_f_; }

 private:
  Measure() = default;
  void check_point(double x) const;

  Kind kind_ = Kind::UniformDensity;
  std::vector<Atom> atoms_;
  double rate_ = 0.0;
  std::vector<double> table_x_;
  std::vector<double> table_f_;
  std::vector<double> table_cdf_;
  std::string spec_;
};

}  // namespace expmap
