#include "expmap/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "expmap/errors.hpp"

namespace expmap {

std::string to_string(Attractor a) {
  switch (a) {
    case Attractor::FixedPoint:
      return "FixedPoint";
    case Attractor::PeriodTwo:
      return "PeriodTwo";
    case Attractor::Undecided:
      return "Undecided";
  }
  return "Undecided";
}

namespace {

// Largest amount by which `hi` dips below `lo` at any node.
double violation(const GridFunction& lo, const GridFunction& hi) {
  return (lo.values() - hi.values()).maxCoeff();
}

void check_envelope(double amount, double slack, const char* what, int iteration) {
  if (amount > slack) {
    throw ConsistencyError(std::string("envelope chain violated (") + what + ") by " +
                           std::to_string(amount) + " at iteration " +
                           std::to_string(iteration));
  }
}

}  // namespace

AttractorReport iterate_envelopes(const ExpLinMap& map, const EnvelopeOptions& options) {
  if (!(options.tol > 0.0)) throw DomainError("tolerance must be positive");
  if (options.max_iter < 2) throw DomainError("max_iter must be at least 2");

  GridFunction upper = map.one();
  GridFunction lower = apply_T(map, upper);
  int iterations = 1;
  check_envelope(violation(lower, upper), options.envelope_slack, "odd <= even", iterations);

  std::vector<GapSample> trace;
  double gap = sup_distance(upper, lower);
  double l1 = l1_distance(upper, lower);
  trace.push_back({iterations, gap, l1, lower[0]});

  Attractor verdict = Attractor::Undecided;
  int stalled = 0;
  const bool near_cutoff = std::abs(map.lambda() - std::numbers::e) <= options.cutoff_band;

  while (true) {
    if (gap <= options.tol) {
      verdict = Attractor::FixedPoint;
      break;
    }
    if (iterations + 2 > options.max_iter) {
      verdict = Attractor::Undecided;
      break;
    }
    GridFunction next_upper = apply_T(map, lower);
    GridFunction next_lower = apply_T(map, next_upper);
    iterations += 2;
    check_envelope(violation(next_upper, upper), options.envelope_slack, "even iterates decrease",
                   iterations);
    check_envelope(violation(lower, next_lower), options.envelope_slack, "odd iterates increase",
                   iterations);
    check_envelope(violation(next_lower, next_upper), options.envelope_slack, "odd <= even",
                   iterations);

    const double next_gap = sup_distance(next_upper, next_lower);
    l1 = l1_distance(next_upper, next_lower);
    trace.push_back({iterations, next_gap, l1, next_lower[0]});
    stalled = std::abs(next_gap - gap) < options.stall_tol ? stalled + 1 : 0;
    gap = next_gap;
    upper = std::move(next_upper);
    lower = std::move(next_lower);

    if (gap > options.tol && stalled >= options.stall_window) {
      verdict = near_cutoff ? Attractor::Undecided : Attractor::PeriodTwo;
      break;
    }
  }
  return AttractorReport{verdict, std::move(lower), std::move(upper), iterations, gap, l1,
                         std::move(trace)};
}

std::vector<GridFunction> iterate_from(const ExpLinMap& map, const GridFunction& f0, int n) {
  if (n < 0) throw DomainError("iteration count must be nonnegative");
  std::vector<GridFunction> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  out.push_back(f0);
  for (int k = 0; k < n; ++k) out.push_back(apply_T(map, out.back()));
  return out;
}

EndpointResult endpoint_criterion(const ExpLinMap& map, int max_N) {
  if (max_N < 0) throw DomainError("max_N must be nonnegative");
  const double threshold = 1.0 / std::numbers::e;
  const double kappa = map.kappa();
  GridFunction odd = apply_T(map, map.one());
  for (int N = 0;; ++N) {
    if (odd[0] > threshold) return {true, N};
    if (N == max_N) break;
    GridFunction next = apply_T(map, apply_T(map, odd));
    const double step = sup_distance(next, odd);
    odd = std::move(next);
    // Odd iterates increase and their increments shrink by at least kappa per
    // double step, so the value at 0 can still grow by at most this much.
    if (kappa < 1.0 && odd[0] + step * kappa / (1.0 - kappa) <= threshold) {
      if (odd[0] > threshold) return {true, N + 1};
      break;
    }
  }
  return {false, std::nullopt};
}

void write_gap_trace_csv(std::ostream& os, const AttractorReport& report) {
  const auto old = os.precision(17);
  os << "iter,sup_gap,l1_gap,F_at_0\n";
  for (const GapSample& s : report.gap_trace) {
    os << s.iteration << ',' << s.sup_gap << ',' << s.l1_gap << ',' << s.value_at_0 << '\n';
  }
  os.precision(old);
}

}  // namespace expmap
