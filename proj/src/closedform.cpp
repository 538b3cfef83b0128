#include "expmap/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "expmap/errors.hpp"
#include "expmap/operator.hpp"

namespace expmap {

double uniform_residual(double lambda, double A) {
  return std::exp(A * lambda) * (A - 1.0) * (A - 1.0) - 1.0;
}

double solve_A(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive");
  // Strictly increasing on [1, 2]: -1 at A = 1, e^{2 lambda} - 1 > 0 at A = 2.
  return bisect([lambda](double A) { return uniform_residual(lambda, A); }, 1.0, 2.0);
}

double uniform_fixed_point_value(double lambda, double A, double x) {
  return A / ((A - 1.0) * std::exp(A * lambda * (1.0 - x)) + 1.0);
}

GridFunction uniform_fixed_point(double lambda, int intervals) {
  const double A = solve_A(lambda);
  Values v(intervals + 1);
  for (int k = 0; k <= intervals; ++k) {
    v[k] = uniform_fixed_point_value(lambda, A, static_cast<double>(k) / intervals);
  }
  return monotone_project(v);
}

double exponential_K_map(double lambda, double K) {
  if (K == 0.0) return lambda;
  return lambda * -std::expm1(-K) / K;
}

double solve_K(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be nonnegative");
  if (lambda == 0.0) return 0.0;
  // K - f(K) is increasing: negative as K -> 0+, nonnegative at K = max(lambda, 1).
  const double hi = std::max(lambda, 1.0);
  return bisect([lambda](double K) { return K - exponential_K_map(lambda, K); },
                std::numeric_limits<double>::min(), hi);
}

GridFunction exponential_fixed_point(double lambda, double rate, int intervals,
                                     std::optional<double> x_max) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (!(rate > 0.0)) throw DomainError("rate must be positive");
  const double length = x_max.value_or(-std::log(kExponentialTailMass) / rate);
  if (!(length > 0.0)) throw DomainError("x_max must be positive");
  const double K = solve_K(lambda);
  return GridFunction::from_function(intervals, length, [&](double x) {
    return std::exp(-K * std::exp(-rate * x));
  });
}

double dirac_map(double lambda, double x) { return std::exp(-lambda * x); }

double solve_M(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive");
  return bisect([lambda](double m) { return dirac_map(lambda, m) - m; }, 0.0, 1.0);
}

PeriodTwoOrbit dirac_period2(double lambda) {
  if (!(lambda > std::numbers::e)) {
    throw DomainError("a proper period-2 orbit exists only for lambda > e");
  }
  const double M = solve_M(lambda);
  auto second = [lambda](double x) { return dirac_map(lambda, dirac_map(lambda, x)) - x; };
  // f(f(0)) - 0 > 0; just left of the repelling fixed point the sign is
  // negative. Widen the gap from M until rounding no longer hides the sign.
  double delta = 1e-9;
  while (!(second(M - delta) < 0.0)) {
    delta *= 10.0;
    if (delta >= M) throw ConsistencyError("could not bracket the period-2 orbit");
  }
  const double low = bisect(second, 0.0, M - delta);
  return {low, dirac_map(lambda, low)};
}

GridFunction dirac_fixed_point(double lambda, double t, int intervals) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError("Dirac location must lie in (0,1)");
  const double M = solve_M(lambda);
  return GridFunction::from_function(intervals, 1.0,
                                     [&](double x) { return x <= t ? M : 1.0; });
}

Family parse_family(const std::string& name) {
  if (name == "uniform") return Family::Uniform;
  if (name == "exponential" || name == "exp") return Family::Exponential;
  if (name == "dirac") return Family::Dirac;
  throw DomainError("unknown family '" + name + "'; expected uniform, exponential or dirac");
}

std::string to_string(Family f) {
  switch (f) {
    case Family::Uniform:
      return "uniform";
    case Family::Exponential:
      return "exponential";
    case Family::Dirac:
      return "dirac";
  }
  return "uniform";
}

ExampleParams solve_example(Family family, double lambda) {
  switch (family) {
    case Family::Uniform: {
      const double A = solve_A(lambda);
      return {family, lambda, "A", A, std::abs(uniform_residual(lambda, A)), std::nullopt};
    }
    case Family::Exponential: {
      const double K = solve_K(lambda);
      return {family, lambda, "K", K, std::abs(K - exponential_K_map(lambda, K)), std::nullopt};
    }
    case Family::Dirac: {
      const double M = solve_M(lambda);
      ExampleParams p{family, lambda, "M", M, std::abs(dirac_map(lambda, M) - M), std::nullopt};
      if (lambda > std::numbers::e) p.period2 = dirac_period2(lambda);
      return p;
    }
  }
  throw DomainError("unknown family");
}

ClosedFormCheck verify_closed_form(double lambda, const Measure& m, int intervals) {
  const ExpLinMap map(lambda, m, intervals);
  ClosedFormCheck check{Family::Uniform, "", 0.0, 0.0, 0};
  GridFunction f = map.zero();
  double jump = -1.0;
  switch (m.kind()) {
    case Measure::Kind::UniformDensity:
      check.param_name = "A";
      check.param = solve_A(lambda);
      f = uniform_fixed_point(lambda, intervals);
      break;
    case Measure::Kind::ExponentialRate:
      check.family = Family::Exponential;
      check.param_name = "K";
      check.param = solve_K(lambda);
      f = exponential_fixed_point(lambda, m.rate(), intervals, map.domain_length());
      break;
    case Measure::Kind::FiniteAtomic:
      if (m.atom_list().size() == 1 && m.atom_list()[0].location > 0.0) {
        check.family = Family::Dirac;
        check.param_name = "M";
        check.param = solve_M(lambda);
        jump = m.atom_list()[0].location;
        f = dirac_fixed_point(lambda, jump, intervals);
        break;
      }
      [[fallthrough]];
    default:
      throw DomainError("closed forms exist only for uniform, exponential and dirac:t with t > 0");
  }
  const GridFunction tf = apply_T(map, f);
  // The jump is a ramp over [x_j, x_{j+1}]. Skip nodes next to it and nodes x
  // whose reflection t - x falls strictly inside the ramp, since T F(x) reads
  // F(t - x) there.
  const double h = f.step();
  const double ramp_lo = std::floor(jump / h) * h;
  const double ramp_hi = ramp_lo + h;
  for (int k = 0; k <= intervals; ++k) {
    const double x = f.node(k);
    const double reflected = jump - x;
    if (jump >= 0.0 && (std::abs(x - jump) <= h * (1.0 + 1e-12) ||
                        (reflected > ramp_lo + 1e-12 * h && reflected < ramp_hi))) {
      ++check.skipped_nodes;
      continue;
    }
    check.sup_residual = std::max(check.sup_residual, std::abs(tf[k] - f[k]));
  }
  return check;
}

}  // namespace expmap
