#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "expmap/operator.hpp"

namespace expmap {

enum class Attractor { FixedPoint, PeriodTwo, Undecided };

std::string to_string(Attractor a);

struct GapSample {
  int iteration;  // index n of the odd iterate One^n
  double sup_gap;
  double l1_gap;
  double value_at_0;  // One^n(0)
};

struct EnvelopeOptions {
  double tol = 1e-9;
  int max_iter = 100000;
  // A gap that moves by less than stall_tol for stall_window consecutive
  // double steps while staying above tol is read as a period-2 attractor.
  double stall_tol = 1e-12;
  int stall_window = 50;
  // Stalls with lambda this close to e are reported as Undecided.
  double cutoff_band = 1e-3;
  // Allowed violation of the monotone envelope chain before it counts as a bug.
  double envelope_slack = 1e-9;
};

/// Outcome of iterating One under T.
///
/// `upper` is the last even iterate One^{2k} and `lower` = T(upper) the
/// following odd iterate; they approximate the limits U and L.
struct AttractorReport {
  Attractor classification;
  GridFunction lower;
  GridFunction upper;
  int iterations_used;
  double final_sup_gap;
  double final_l1_gap;
  std::vector<GapSample> gap_trace;
};

/// Runs the envelope sequences One^n until the even/odd gap drops below
/// `tol` (FixedPoint), the gap stalls (PeriodTwo) or max_iter is hit
/// (Undecided). Throws ConsistencyError if the envelope chain
/// One^{2k+1} <= One^{2k+3} <= One^{2k+2} <= One^{2k} is violated.
AttractorReport iterate_envelopes(const ExpLinMap& map, const EnvelopeOptions& options = {});

/// Trajectory T^k(F0) for k = 0..n.
std::vector<GridFunction> iterate_from(const ExpLinMap& map, const GridFunction& f0, int n);

struct EndpointResult {
  bool holds;
  std::optional<int> N;
};

/// Least N <= max_N with One^{2N+1}(0) > 1/e, if any.
EndpointResult endpoint_criterion(const ExpLinMap& map, int max_N);

/// CSV with header `iter,sup_gap,l1_gap,F_at_0`.
void write_gap_trace_csv(std::ostream& os, const AttractorReport& report);

}  // namespace expmap
