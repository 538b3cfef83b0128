#pragma once

#include <memory>

#include "expmap/gridfn.hpp"
#include "expmap/measure.hpp"

namespace expmap {

/// Convolution Phi_mu(F)(x) = int_{[x, end]} F(z - x) dmu(z) at every node.
///
/// The result is nonincreasing in x and vanishes at x = 1 for measures on
/// [0,1]. For the exponential the grid spans [0, grid_domain()] and F is
/// taken as 1 past the right end, which makes the convolution exact for the
/// piecewise-linear interpolant: Phi F(x) = e^{-ax} E_a[F].
Values phi(const Measure& m, const GridFunction& f);

/// Same on a raw nodal array (perturbed functions that may leave [0,1]).
Values phi_values(const Measure& m, const Values& f, double domain_length);

/// Point evaluation of Phi F at an arbitrary x. With include_atom_at_x false
/// an atom sitting exactly at x is dropped, giving the right limit.
double phi_at(const Measure& m, const GridFunction& f, double x, bool include_atom_at_x = true);

/// Positive linear endomorphism Psi acting on nodal arrays of one grid.
class PositiveLinearOperator {
 public:
  virtual ~PositiveLinearOperator() = default;
  virtual Values apply(const Values& f) const = 0;
  /// Upper bound on the sup-norm operator norm.
  virtual double sup_norm_bound() const = 0;
  virtual int intervals() const = 0;
  virtual double domain_length() const = 0;
};

/// Psi = lambda * Phi_mu.
class ScaledConvolution final : public PositiveLinearOperator {
 public:
  ScaledConvolution(double lambda, Measure m, int intervals);

  Values apply(const Values& f) const override;
  double sup_norm_bound() const override { return lambda_; }
  int intervals() const override { return intervals_; }
  double domain_length() const override { return measure_.grid_domain(); }

  double lambda() const { return lambda_; }
  const Measure& measure() const { return measure_; }

 private:
  double lambda_;
  Measure measure_;
  int intervals_;
};

/// The exponential-linear map T(F) = exp(-Psi F).
class ExpLinMap {
 public:
  ExpLinMap(double lambda, Measure m, int intervals = kDefaultIntervals);
  explicit ExpLinMap(std::shared_ptr<const PositiveLinearOperator> psi);

  const PositiveLinearOperator& psi() const { return *psi_; }
  /// sup-norm bound of Psi; equals lambda for the convolution instance.
  double lambda() const { return psi_->sup_norm_bound(); }
  int intervals() const { return psi_->intervals(); }
  double domain_length() const { return psi_->domain_length(); }

  /// Contraction constant of T^2 in the sup norm, ||Psi|| / e.
  double kappa() const;

  GridFunction zero() const { return GridFunction::zero(intervals(), domain_length()); }
  GridFunction one() const { return GridFunction::one(intervals(), domain_length()); }

 private:
  std::shared_ptr<const PositiveLinearOperator> psi_;
};

/// exp(-Psi F) nodewise, then monotone_project.
GridFunction apply_T(const ExpLinMap& map, const GridFunction& f);
GridFunction apply_T_values(const ExpLinMap& map, const Values& f);

/// Analytic directional derivative DT(F)H = -T(F) * Psi(H).
Values derivative_T(const ExpLinMap& map, const GridFunction& f, const Values& h);

/// |int F Phi G dx - int Phi F G dx| by a trapezoid rule whose mesh also
/// breaks at atom locations, where Phi G jumps.
double adjoint_defect(const Measure& m, const GridFunction& f, const GridFunction& g);

struct NormRatios {
  double sup_ratio;
  double l1_ratio;
};

/// (sup|Phi H| / sup|H|, int|Phi H| / int|H|).
NormRatios norm_probe(const Measure& m, const GridFunction& h);

/// sup|T^2(F + sH) - T^2(F)| / (s sup|H|). F + sH must stay nondecreasing
/// and nonnegative; overshoot above 1 is allowed since T is defined for any
/// bounded function.
double contraction_ratio_probe(const ExpLinMap& map, const GridFunction& f, const Values& h,
                               double scale);

}  // namespace expmap
