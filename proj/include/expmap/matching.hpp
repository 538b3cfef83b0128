#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "expmap/gridfn.hpp"
#include "expmap/measure.hpp"
#include "expmap/random.hpp"

namespace expmap {

struct Edge {
  int u;
  int v;
  double weight;
};

/// Undirected graph on nodes 0..n-1; edges have u < v, no duplicates.
struct WeightedGraph {
  int n = 0;
  std::vector<Edge> edges;

  /// Throws DomainError on self-loops, duplicates, bad indices or negative weights.
  void validate() const;
};

struct MatchingResult {
  std::vector<Edge> edges;
  double total_weight = 0.0;
};

/// Erdos-Renyi G(n, lambda/n) with i.i.d. mu-distributed edge weights.
WeightedGraph gen_graph(int n, double lambda, const Measure& m, Rng& rng);

/// Exact maximum-weight matching (primal-dual blossom algorithm, O(n^3)).
///
/// Weights are mapped to integers with 2^40 units for the heaviest edge so
/// that dual updates are exact; the reported weight is the sum of the
/// original doubles.
MatchingResult max_weight_matching(const WeightedGraph& g);

/// Exhaustive search with bound pruning; limited to 24 edges.
MatchingResult brute_force_matching(const WeightedGraph& g);

/// Heaviest-edge-first greedy matching (a lower bound).
MatchingResult greedy_matching(const WeightedGraph& g);

namespace detail {

struct IntEdge {
  int u;
  int v;
  std::int64_t weight;
};

/// mate[v] = partner of v or -1.
std::vector<int> blossom_mate(int n, std::span<const IntEdge> edges);

}  // namespace detail

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Mean and standard error of M_mu(n, lambda) / n over independent graphs.
/// Graph i uses make_stream(seed, i), so results do not depend on `workers`.
Estimate empirical_limit(int n, double lambda, const Measure& m, int samples, std::uint64_t seed,
                         int workers = 0);

/// Monte Carlo value of (1/2) E[sum_{i<=K} W_i 1{W_i - X_i = max_j (W_j - X_j) > 0}]
/// with K ~ Pois(lambda), W ~ mu, X ~ F*. Replicates are split into blocks of
/// kBlockSize, block b drawing from make_stream(seed, b).
Estimate analytic_limit(double lambda, const Measure& m, const GridFunction& f_star, int samples,
                        std::uint64_t seed, int workers = 0);

/// Kolmogorov-Smirnov distance on [0, L] between the empirical law of
/// X = max_{i<=K}(W_i - X_i) (X = 0 when K = 0, negatives count as <= 0)
/// and T_lambda(F).
double recursion_cdf_check(double lambda, const Measure& m, const GridFunction& f, int samples,
                           std::uint64_t seed);

/// Poisson draw by CDF inversion.
int sample_poisson(double lambda, Rng& rng);

struct LimitEstimate {
  double empirical_mean;
  double std_error;
  double analytic_value;
  double analytic_std_error;
  int n;
  int samples;
};

inline constexpr int kBlockSize = 4096;

}  // namespace expmap
