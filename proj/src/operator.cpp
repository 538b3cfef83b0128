#include "expmap/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "expmap/errors.hpp"

namespace expmap {

namespace {

void check_domain(const Measure& m, double domain_length) {
  const double want = m.grid_domain();
  if (std::abs(domain_length - want) > 1e-12 * want) {
    throw DomainError("grid domain [0," + std::to_string(domain_length) +
                      "] does not match the measure's domain [0," + std::to_string(want) + "]");
  }
}

// Exact integral of the piecewise-linear interpolant over [0, y], y <= L.
double integral_to(const Values& f, double length, double y) {
  const int n = static_cast<int>(f.size()) - 1;
  const double h = length / n;
  y = std::clamp(y, 0.0, length);
  const int full = std::min(static_cast<int>(y / h), n);
  double s = 0.0;
  for (int j = 0; j < full; ++j) s += 0.5 * h * (f[j] + f[j + 1]);
  const double rest = y - full * h;
  if (full < n && rest > 0.0) {
    const double end = f[full] + (f[full + 1] - f[full]) * rest / h;
    s += 0.5 * rest * (f[full] + end);
  }
  return s;
}

// E_a[F] for F piecewise linear on [0, L] and equal to 1 beyond L.
double exponential_mean(const Values& f, double rate, double length) {
  const int n = static_cast<int>(f.size()) - 1;
  const double h = length / n;
  const double x = rate * h;
  const double p = -std::expm1(-x);  // mass of one cell relative to its left end
  const double q = p / x - std::exp(-x);
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    s += std::exp(-rate * h * j) * ((p - q) * f[j] + q * f[j + 1]);
  }
  return s + std::exp(-rate * length);
}

Values phi_atoms(const Measure& m, const Values& f, double length) {
  const int n = static_cast<int>(f.size()) - 1;
  Values out = Values::Zero(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double x = length * k / n;
    double s = 0.0;
    for (const Atom& a : m.atom_list()) {
      if (a.location >= x) s += a.weight * eval_values(f, length, a.location - x);
    }
    out[k] = s;
  }
  return out;
}

Values phi_uniform(const Values& f, double length) {
  const int n = static_cast<int>(f.size()) - 1;
  const double h = length / n;
  Values cumulative(n + 1);
  cumulative[0] = 0.0;
  for (int j = 1; j <= n; ++j) cumulative[j] = cumulative[j - 1] + 0.5 * h * (f[j - 1] + f[j]);
  return cumulative.reverse();
}

Values phi_table(const Measure& m, const Values& f, double length) {
  const int n = static_cast<int>(f.size()) - 1;
  const double h = length / n;
  Values rho(n + 1);
  for (int j = 0; j <= n; ++j) rho[j] = m.density(length * j / n);
  // Unit discrete mass keeps the sup norm of the discretized operator <= 1.
  rho /= trapezoid(rho, h);
  Values out(n + 1);
  for (int k = 0; k <= n; ++k) {
    const int len = n - k + 1;
    if (len == 1) {
      out[k] = 0.0;
      continue;
    }
    const double dot = (f.head(len) * rho.tail(len)).sum();
    out[k] = h * (dot - 0.5 * (f[0] * rho[k] + f[n - k] * rho[n]));
  }
  return out;
}

}  // namespace

Values phi_values(const Measure& m, const Values& f, double domain_length) {
  check_domain(m, domain_length);
  if (f.size() < 2) throw DomainError("phi needs at least one grid interval");
  switch (m.kind()) {
    case Measure::Kind::FiniteAtomic:
      return phi_atoms(m, f, domain_length);
    case Measure::Kind::UniformDensity:
      return phi_uniform(f, domain_length);
    case Measure::Kind::TabulatedDensity:
      return phi_table(m, f, domain_length);
    case Measure::Kind::ExponentialRate: {
      const int n = static_cast<int>(f.size()) - 1;
      const double mean = exponential_mean(f, m.rate(), domain_length);
      Values out(n + 1);
      for (int k = 0; k <= n; ++k) out[k] = std::exp(-m.rate() * domain_length * k / n) * mean;
      return out;
    }
  }
  return {};
}

Values phi(const Measure& m, const GridFunction& f) {
  return phi_values(m, f.values(), f.domain_length());
}

double phi_at(const Measure& m, const GridFunction& f, double x, bool include_atom_at_x) {
  check_domain(m, f.domain_length());
  const double length = f.domain_length();
  if (x < 0.0 || x > length) throw DomainError("phi_at outside the grid domain");
  switch (m.kind()) {
    case Measure::Kind::FiniteAtomic: {
      double s = 0.0;
      for (const Atom& a : m.atom_list()) {
        if (a.location > x || (include_atom_at_x && a.location == x)) {
          s += a.weight * eval(f, a.location - x);
        }
      }
      return s;
    }
    case Measure::Kind::UniformDensity:
      return integral_to(f.values(), length, 1.0 - x);
    case Measure::Kind::ExponentialRate:
      return std::exp(-m.rate() * x) * exponential_mean(f.values(), m.rate(), length);
    case Measure::Kind::TabulatedDensity:
      return m.integrate_against([&](double z) { return eval(f, z - x); }, x, 1.0,
                                 f.intervals());
  }
  return 0.0;
}

ScaledConvolution::ScaledConvolution(double lambda, Measure m, int intervals)
    : lambda_(lambda), measure_(std::move(m)), intervals_(intervals) {
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) {
    throw DomainError("lambda must be positive and finite");
  }
  if (intervals_ < 1) throw DomainError("grid needs at least one interval");
}

Values ScaledConvolution::apply(const Values& f) const {
  if (f.size() != intervals_ + 1) throw DomainError("function does not match the operator grid");
  return lambda_ * phi_values(measure_, f, measure_.grid_domain());
}

ExpLinMap::ExpLinMap(double lambda, Measure m, int intervals)
    : psi_(std::make_shared<ScaledConvolution>(lambda, std::move(m), intervals)) {}

ExpLinMap::ExpLinMap(std::shared_ptr<const PositiveLinearOperator> psi) : psi_(std::move(psi)) {
  if (!psi_) throw DomainError("null operator");
}

double ExpLinMap::kappa() const { return lambda() / std::numbers::e; }

GridFunction apply_T_values(const ExpLinMap& map, const Values& f) {
  const Values exponent = map.psi().apply(f);
  return monotone_project((-exponent).exp(), map.domain_length());
}

GridFunction apply_T(const ExpLinMap& map, const GridFunction& f) {
  if (f.intervals() != map.intervals() ||
      std::abs(f.domain_length() - map.domain_length()) > 1e-12 * map.domain_length()) {
    throw DomainError("grid function does not live on the map's grid");
  }
  return apply_T_values(map, f.values());
}

Values derivative_T(const ExpLinMap& map, const GridFunction& f, const Values& h) {
  return -apply_T(map, f).values() * map.psi().apply(h);
}

namespace {

// int_0^1 A(x) Phi B(x) dx. The mesh is the grid plus every atom location;
// Phi B is left-continuous with a jump at each atom, so each sub-segment uses
// the right limit at its left end and the left limit at its right end.
double inner_with_phi(const Measure& m, const GridFunction& a, const GridFunction& b) {
  const Values pb = phi(m, b);
  if (!m.has_atoms()) return trapezoid(a.values() * pb, a.step());

  const int n = a.intervals();
  std::vector<double> jumps;
  for (const Atom& at : m.atom_list()) {
    if (at.location < 1.0) jumps.push_back(at.location);
  }
  std::size_t next = 0;
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x0 = a.node(k);
    const double x1 = a.node(k + 1);
    double left_x = x0;
    double left_val = pb[k];
    while (next < jumps.size() && jumps[next] < x0) ++next;
    if (next < jumps.size() && jumps[next] == x0) {
      left_val = phi_at(m, b, x0, false);
      ++next;
    }
    while (next < jumps.size() && jumps[next] < x1) {
      const double p = jumps[next];
      const double before = phi_at(m, b, p, true);
      total += 0.5 * (p - left_x) * (eval(a, left_x) * left_val + eval(a, p) * before);
      left_x = p;
      left_val = phi_at(m, b, p, false);
      ++next;
    }
    total += 0.5 * (x1 - left_x) * (eval(a, left_x) * left_val + a[k + 1] * pb[k + 1]);
  }
  return total;
}

}  // namespace

double adjoint_defect(const Measure& m, const GridFunction& f, const GridFunction& g) {
  if (m.is_unbounded()) throw DomainError("adjoint_defect is defined on [0,1] only");
  if (!same_grid(f, g)) throw DomainError("grid functions live on different grids");
  return std::abs(inner_with_phi(m, f, g) - inner_with_phi(m, g, f));
}

NormRatios norm_probe(const Measure& m, const GridFunction& h) {
  const double sup_h = h.values().abs().maxCoeff();
  if (sup_h == 0.0) throw DomainError("norm_probe needs a nonzero H");
  const Values ph = phi(m, h);
  const double l1_h = trapezoid(h.values(), h.step());
  double l1_ph = 0.0;
  if (m.is_unbounded()) {
    l1_ph = trapezoid(ph, h.step());
  } else {
    // Phi H >= 0 for H >= 0, so int |Phi H| = int One * Phi H.
    l1_ph = inner_with_phi(m, GridFunction::one(h.intervals(), h.domain_length()), h);
  }
  return {ph.abs().maxCoeff() / sup_h, l1_ph / l1_h};
}

double contraction_ratio_probe(const ExpLinMap& map, const GridFunction& f, const Values& h,
                               double scale) {
  if (!(scale > 0.0)) throw DomainError("perturbation scale must be positive");
  if (h.size() != f.values().size()) throw DomainError("direction does not match the grid");
  const double sup_h = h.abs().maxCoeff();
  if (!(sup_h > 0.0) || !std::isfinite(sup_h)) {
    throw DomainError("perturbation direction must be nonzero and finite");
  }
  const Values perturbed = f.values() + scale * h;
  for (Eigen::Index k = 0; k < perturbed.size(); ++k) {
    if (perturbed[k] < 0.0 || (k > 0 && perturbed[k] < perturbed[k - 1])) {
      throw DomainError("F + scale*H leaves the space of distribution functions");
    }
  }
  const GridFunction t2_perturbed = apply_T(map, apply_T_values(map, perturbed));
  const GridFunction t2_base = apply_T(map, apply_T(map, f));
  return sup_distance(t2_perturbed, t2_base) / (scale * sup_h);
}

}  // namespace expmap
