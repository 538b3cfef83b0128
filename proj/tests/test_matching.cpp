#include <doctest.h>

#include <cmath>

#include "expmap/dynamics.hpp"
#include "expmap/errors.hpp"
#include "expmap/matching.hpp"
#include "oracles.hpp"

using namespace expmap;

TEST_CASE("small hand-checked instances") {
  WeightedGraph tri{3, {{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 3.0}}};
  CHECK(max_weight_matching(tri).total_weight == 3.0);
  CHECK(brute_force_matching(tri).total_weight == 3.0);

  WeightedGraph path{4, {{0, 1, 2.0}, {1, 2, 3.0}, {2, 3, 2.0}}};
  const MatchingResult r = max_weight_matching(path);
  CHECK(r.total_weight == 4.0);
  CHECK(r.edges.size() == 2);
  CHECK(greedy_matching(path).total_weight == 3.0);

  // Odd cycle plus pendant edges forces blossom handling.
  WeightedGraph blossom{6, {{0, 1, 10.0}, {1, 2, 10.0}, {0, 2, 10.0}, {2, 3, 4.0}, {0, 4, 4.0},
                           {1, 5, 4.0}}};
  CHECK(max_weight_matching(blossom).total_weight == doctest::Approx(14.0));
  CHECK(oracle::exhaustive_matching(blossom) == doctest::Approx(14.0));

  CHECK(max_weight_matching(WeightedGraph{5, {}}).total_weight == 0.0);
  CHECK(max_weight_matching(WeightedGraph{2, {{0, 1, 0.0}}}).total_weight == 0.0);
}

TEST_CASE("graph validation") {
  CHECK_THROWS_AS(max_weight_matching(WeightedGraph{3, {{0, 0, 1.0}}}), DomainError);
  CHECK_THROWS_AS(max_weight_matching(WeightedGraph{3, {{0, 3, 1.0}}}), DomainError);
  CHECK_THROWS_AS(max_weight_matching(WeightedGraph{3, {{1, 0, 1.0}}}), DomainError);
  CHECK_THROWS_AS(max_weight_matching(WeightedGraph{3, {{0, 1, -1.0}}}), DomainError);
  CHECK_THROWS_AS(max_weight_matching(WeightedGraph{3, {{0, 1, 1.0}, {0, 1, 2.0}}}),
                  DomainError);
}

TEST_CASE("exact solver agrees with exhaustive enumeration") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 300; ++t) {
    const WeightedGraph g = oracle::random_small_graph(rng, 4 + t % 7, 15);
    const MatchingResult exact = max_weight_matching(g);
    CHECK(oracle::is_matching(g, exact));
    const double truth = oracle::exhaustive_matching(g);
    CHECK(exact.total_weight == doctest::Approx(truth).epsilon(1e-12));
    CHECK(brute_force_matching(g).total_weight == doctest::Approx(truth).epsilon(1e-12));
    CHECK(greedy_matching(g).total_weight <= exact.total_weight + 1e-12);
  }
}

TEST_CASE("random sparse graphs match brute force") {
  const Measure u = Measure::uniform();
  int tested = 0;
  for (std::uint64_t i = 0; tested < 100; ++i) {
    Rng rng = make_stream(42, i);
    const WeightedGraph g = gen_graph(10, 3.0, u, rng);
    if (g.edges.size() > 15) continue;
    ++tested;
    CHECK(max_weight_matching(g).total_weight ==
          doctest::Approx(brute_force_matching(g).total_weight).epsilon(1e-12));
  }
}

TEST_CASE("removing an edge never increases the optimum") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    WeightedGraph g = oracle::random_small_graph(rng, 12, 30);
    const double before = max_weight_matching(g).total_weight;
    g.edges.erase(g.edges.begin() + static_cast<long>(rng() % g.edges.size()));
    CHECK(max_weight_matching(g).total_weight <= before + 1e-12);
  }
}

TEST_CASE("larger instances: exact beats greedy and is a valid matching") {
  const Measure u = Measure::uniform();
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng = make_stream(7, i);
    const WeightedGraph g = gen_graph(300, 2.5, u, rng);
    const MatchingResult exact = max_weight_matching(g);
    CHECK(oracle::is_matching(g, exact));
    CHECK(exact.total_weight >= greedy_matching(g).total_weight - 1e-12);
  }
  WeightedGraph big{30, {}};
  for (int i = 0; i < 25; ++i) big.edges.push_back({i, i + 1, 1.0});
  CHECK_THROWS_AS(brute_force_matching(big), DomainError);
}

TEST_CASE("graph generator") {
  const Measure u = Measure::uniform();
  Rng rng = make_stream(3, 0);
  double total = 0.0, square = 0.0;
  const int graphs = 500;
  for (int i = 0; i < graphs; ++i) {
    const double e = static_cast<double>(gen_graph(100, 1.0, u, rng).edges.size());
    total += e;
    square += e * e;
  }
  const double mean = total / graphs;
  const double se = std::sqrt((square / graphs - mean * mean) / graphs);
  CHECK(std::abs(mean - 49.5) <= 3.0 * se);

  const WeightedGraph g = gen_graph(50, 2.0, u, rng);
  for (const Edge& e : g.edges) {
    CHECK(e.weight >= 0.0);
    CHECK(e.weight <= 1.0);
  }
  int empty = 0;
  for (int i = 0; i < 100; ++i) empty += gen_graph(2, 1e-9, u, rng).edges.empty();
  CHECK(empty == 100);
  CHECK_THROWS_AS(gen_graph(10, 10.0, u, rng), DomainError);
  CHECK_THROWS_AS(gen_graph(1, 0.5, u, rng), DomainError);
}

TEST_CASE("poisson sampler") {
  Rng rng = make_stream(4, 0);
  for (double lambda : {0.5, 2.0, 10.0}) {
    const int n = 100000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += sample_poisson(lambda, rng);
    CHECK(std::abs(s / n - lambda) <= 4.0 * std::sqrt(lambda / n));
  }
  CHECK(sample_poisson(0.0, rng) == 0);
}

TEST_CASE("limit estimators") {
  const Measure u = Measure::uniform();
  const ExpLinMap map(1.0, u);
  const GridFunction f_star = iterate_envelopes(map).upper;

  const Estimate tiny = empirical_limit(50, 1e-9, u, 10, 1);
  CHECK(tiny.mean == 0.0);
  CHECK(analytic_limit(1e-9, u, f_star, 1000, 1).mean == 0.0);
  CHECK_THROWS_AS(analytic_limit(1.0, Measure::dirac(0.5), f_star, 100, 1), DomainError);
  CHECK_THROWS_AS(empirical_limit(50, 1.0, u, 1, 1), DomainError);

  const Estimate a1 = empirical_limit(60, 1.0, u, 40, 9, 1);
  const Estimate a4 = empirical_limit(60, 1.0, u, 40, 9, 4);
  CHECK(a1.mean == a4.mean);
  CHECK(a1.std_error == a4.std_error);
  const Estimate b1 = analytic_limit(1.0, u, f_star, 3 * kBlockSize + 17, 9, 1);
  const Estimate b3 = analytic_limit(1.0, u, f_star, 3 * kBlockSize + 17, 9, 3);
  CHECK(b1.mean == b3.mean);

  const Estimate ana = analytic_limit(1.0, u, f_star, 1000000, 5);
  CHECK(ana.std_error < 1e-3);
  CHECK(ana.std_error > 0.0);
  const Estimate emp = empirical_limit(100, 1.0, u, 200, 6);
  const double combined = std::hypot(ana.std_error, emp.std_error);
  CHECK(std::abs(emp.mean - ana.mean) <= 3.0 * combined + 2.0 / 100);

  const Estimate coarse =
      analytic_limit(1.0, u, iterate_envelopes(ExpLinMap(1.0, u, 1024)).upper, 1000000, 5);
  CHECK(std::abs(coarse.mean - ana.mean) <= 3.0 * std::hypot(coarse.std_error, ana.std_error));

  const Estimate e50 = empirical_limit(50, 1.0, u, 400, 8);
  const Estimate e150 = empirical_limit(150, 1.0, u, 400, 8);
  CHECK(std::abs(e150.mean - ana.mean) <=
        std::abs(e50.mean - ana.mean) + 3.0 * std::hypot(e50.std_error, e150.std_error));
}

TEST_CASE("distributional recursion") {
  const Measure u = Measure::uniform();
  const ExpLinMap map(1.0, u);
  CHECK(recursion_cdf_check(1.0, u, map.one(), 100000, 3) <= 0.01);
  CHECK(recursion_cdf_check(1.0, u, iterate_envelopes(map).upper, 100000, 4) <= 0.01);

  const Measure e = Measure::exponential(1.0);
  const GridFunction fk =
      GridFunction::from_function(kDefaultIntervals, e.grid_domain(), [](double x) {
        return std::exp(-oracle::kK_2 * std::exp(-x));
      });
  CHECK(recursion_cdf_check(2.0, e, fk, 100000, 5) <= 0.01);

  // X_i = 1 under Zero, so every draw is 0 and T(Zero) = One matches exactly.
  CHECK(recursion_cdf_check(1.0, u, map.zero(), 1000, 6) == 0.0);
}
