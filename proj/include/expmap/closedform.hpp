#pragma once

#include <optional>
#include <string>

#include "expmap/gridfn.hpp"
#include "expmap/measure.hpp"

namespace expmap {

/// Bisection for a sign change of f on [lo, hi]. Runs a fixed number of
/// halvings and stops early once the midpoint no longer moves in double
/// precision.
template <typename Fn>
double bisect(Fn&& f, double lo, double hi, int iterations = 200) {
  double flo = f(lo);
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Uniform measure: A solves e^{A lambda} (A - 1)^2 = 1 with A in (1, 2).
double solve_A(double lambda);
double uniform_residual(double lambda, double A);
/// A e^{A lambda x} / (e^{A lambda}(A - 1) + e^{A lambda x}), written as
/// A / ((A - 1) e^{A lambda (1 - x)} + 1) so that F(1) = 1 exactly.
double uniform_fixed_point_value(double lambda, double A, double x);
GridFunction uniform_fixed_point(double lambda, int intervals = kDefaultIntervals);

// Exponential measure: K is the fixed point of lambda (1 - e^{-K}) / K.
double exponential_K_map(double lambda, double K);
double solve_K(double lambda);
/// exp(-K e^{-a x}) on [0, x_max]; x_max defaults to the measure truncation.
GridFunction exponential_fixed_point(double lambda, double rate = 1.0,
                                     int intervals = kDefaultIntervals,
                                     std::optional<double> x_max = std::nullopt);

// Dirac measure: the plateau dynamics is x -> e^{-lambda x}.
double dirac_map(double lambda, double x);
double solve_M(double lambda);

struct PeriodTwoOrbit {
  double low;
  double high;
};

/// The 2-cycle low < M < high of e^{-lambda x}; requires lambda > e.
PeriodTwoOrbit dirac_period2(double lambda);

/// M on [0, t], 1 from the next node on; the jump smears over one cell.
GridFunction dirac_fixed_point(double lambda, double t, int intervals = kDefaultIntervals);

enum class Family { Uniform, Exponential, Dirac };

Family parse_family(const std::string& name);
std::string to_string(Family f);

struct ExampleParams {
  Family family;
  double lambda;
  std::string param_name;  // "A", "K" or "M"
  double param;
  double residual;
  std::optional<PeriodTwoOrbit> period2;  // Dirac with lambda > e
};

ExampleParams solve_example(Family family, double lambda);

struct ClosedFormCheck {
  Family family;
  std::string param_name;
  double param;
  double sup_residual;  // sup |T(F) - F| over the checked nodes
  int skipped_nodes;    // nodes that read the smeared jump cell
};

/// Builds the closed-form fixed point for `m` (uniform, exponential or a
/// single Dirac atom) on the measure's grid and measures how far T moves it.
ClosedFormCheck verify_closed_form(double lambda, const Measure& m,
                                   int intervals = kDefaultIntervals);

}  // namespace expmap
