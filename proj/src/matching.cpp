#include "expmap/matching.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <thread>
#include <utility>

#include "expmap/errors.hpp"
#include "expmap/operator.hpp"

namespace expmap {

void WeightedGraph::validate() const {
  if (n < 0) throw DomainError("negative node count");
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v >= n || !(e.u < e.v)) {
      throw DomainError("edges need 0 <= u < v < n");
    }
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw DomainError("edge weights must be finite and nonnegative");
    }
    if (!seen.insert({e.u, e.v}).second) throw DomainError("duplicate edge");
  }
}

WeightedGraph gen_graph(int n, double lambda, const Measure& m, Rng& rng) {
  if (n < 2) throw DomainError("random graph needs at least two nodes");
  if (!(lambda > 0.0) || !(lambda < n)) throw DomainError("need 0 < lambda < n");
  const double p = lambda / n;
  WeightedGraph g;
  g.n = n;
  std::bernoulli_distribution coin(p);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (coin(rng)) g.edges.push_back({i, j, m.sample(rng)});
    }
  }
  return g;
}

MatchingResult max_weight_matching(const WeightedGraph& g) {
  g.validate();
  MatchingResult result;
  double heaviest = 0.0;
  for (const Edge& e : g.edges) heaviest = std::max(heaviest, e.weight);
  if (heaviest == 0.0) return result;

  const double scale = std::ldexp(1.0, 40) / heaviest;
  std::vector<detail::IntEdge> scaled;
  std::vector<int> origin;
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const Edge& e = g.edges[k];
    const auto w = static_cast<std::int64_t>(std::llround(e.weight * scale));
    if (w <= 0) continue;  // zero-weight edges never increase the total
    scaled.push_back({e.u, e.v, w});
    origin.push_back(static_cast<int>(k));
  }
  const std::vector<int> mate = detail::blossom_mate(g.n, scaled);
  for (std::size_t k = 0; k < scaled.size(); ++k) {
    const auto& e = scaled[k];
    if (mate[e.u] == e.v) {
      result.edges.push_back(g.edges[origin[k]]);
      result.total_weight += g.edges[origin[k]].weight;
    }
  }
  return result;
}

MatchingResult brute_force_matching(const WeightedGraph& g) {
  g.validate();
  if (g.edges.size() > 24) throw DomainError("brute force matching is limited to 24 edges");
  std::vector<Edge> edges = g.edges;
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.weight > b.weight; });
  std::vector<double> suffix(edges.size() + 1, 0.0);
  for (std::size_t k = edges.size(); k-- > 0;) suffix[k] = suffix[k + 1] + edges[k].weight;

  std::vector<bool> used(static_cast<std::size_t>(g.n), false);
  std::vector<int> chosen, best_set;
  double best = 0.0;
  std::function<void(std::size_t, double)> search = [&](std::size_t k, double acc) {
    if (acc > best) {
      best = acc;
      best_set = chosen;
    }
    if (k == edges.size() || acc + suffix[k] <= best) return;
    const Edge& e = edges[k];
    if (!used[e.u] && !used[e.v]) {
      used[e.u] = used[e.v] = true;
      chosen.push_back(static_cast<int>(k));
      search(k + 1, acc + e.weight);
      chosen.pop_back();
      used[e.u] = used[e.v] = false;
    }
    search(k + 1, acc);
  };
  search(0, 0.0);

  MatchingResult result;
  for (int k : best_set) {
    result.edges.push_back(edges[k]);
    result.total_weight += edges[k].weight;
  }
  return result;
}

MatchingResult greedy_matching(const WeightedGraph& g) {
  g.validate();
  std::vector<Edge> edges = g.edges;
  std::stable_sort(edges.begin(), edges.end(),
                   [](const Edge& a, const Edge& b) { return a.weight > b.weight; });
  std::vector<bool> used(static_cast<std::size_t>(g.n), false);
  MatchingResult result;
  for (const Edge& e : edges) {
    if (used[e.u] || used[e.v]) continue;
    used[e.u] = used[e.v] = true;
    result.edges.push_back(e);
    result.total_weight += e.weight;
  }
  return result;
}

int sample_poisson(double lambda, Rng& rng) {
  if (!(lambda >= 0.0) || lambda > 700.0) throw DomainError("Poisson rate out of range");
  const double u = uniform01(rng);
  double pmf = std::exp(-lambda);
  double cdf = pmf;
  int k = 0;
  while (u > cdf && pmf > 0.0) {
    ++k;
    pmf *= lambda / k;
    cdf += pmf;
  }
  return k;
}

namespace {

int resolve_workers(int workers, int tasks) {
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return std::max(1, std::min(workers, tasks));
}

// Runs task(i) for i in [0, count) over `workers` threads; each index is
// handled exactly once and results are written to per-index slots.
template <typename Task>
void parallel_for(int count, int workers, Task&& task) {
  workers = resolve_workers(workers, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < count; i += workers) task(i);
    });
  }
}

Estimate summarize(const std::vector<double>& sums, const std::vector<double>& squares,
                   long long count) {
  double s = 0.0, q = 0.0;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    s += sums[i];
    q += squares[i];
  }
  const double mean = s / count;
  const double var = std::max(0.0, (q - count * mean * mean) / (count - 1));
  return {mean, std::sqrt(var / count)};
}

}  // namespace

Estimate empirical_limit(int n, double lambda, const Measure& m, int samples, std::uint64_t seed,
                         int workers) {
  if (samples < 2) throw DomainError("need at least two samples");
  std::vector<double> values(static_cast<std::size_t>(samples));
  parallel_for(samples, workers, [&](int i) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(i));
    const WeightedGraph g = gen_graph(n, lambda, m, rng);
    values[i] = max_weight_matching(g).total_weight / n;
  });
  std::vector<double> squares(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) squares[i] = values[i] * values[i];
  return summarize(values, squares, samples);
}

Estimate analytic_limit(double lambda, const Measure& m, const GridFunction& f_star, int samples,
                        std::uint64_t seed, int workers) {
  if (samples < 2) throw DomainError("need at least two samples");
  if (m.has_atoms()) {
    throw DomainError("the matching limit formula requires an atom-free weight distribution");
  }
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  const int blocks = (samples + kBlockSize - 1) / kBlockSize;
  std::vector<double> sums(static_cast<std::size_t>(blocks), 0.0);
  std::vector<double> squares(static_cast<std::size_t>(blocks), 0.0);
  parallel_for(blocks, workers, [&](int b) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(b));
    const int begin = b * kBlockSize;
    const int end = std::min(samples, begin + kBlockSize);
    std::vector<double> w;
    double s = 0.0, q = 0.0;
    for (int r = begin; r < end; ++r) {
      const int k = sample_poisson(lambda, rng);
      w.resize(static_cast<std::size_t>(k));
      double best = 0.0;
      int arg = -1;
      for (int i = 0; i < k; ++i) {
        w[i] = m.sample(rng);
        const double gain = w[i] - sample_from(f_star, rng);
        // Strict comparison keeps the lowest index on ties.
        if (arg == -1 || gain > best) {
          best = gain;
          arg = i;
        }
      }
      const double contribution = (arg >= 0 && best > 0.0) ? 0.5 * w[arg] : 0.0;
      s += contribution;
      q += contribution * contribution;
    }
    sums[b] = s;
    squares[b] = q;
  });
  return summarize(sums, squares, samples);
}

double recursion_cdf_check(double lambda, const Measure& m, const GridFunction& f, int samples,
                           std::uint64_t seed) {
  if (samples < 1) throw DomainError("need at least one sample");
  const ExpLinMap map(lambda, m, f.intervals());
  const GridFunction target = apply_T(map, f);
  const double length = f.domain_length();

  Rng rng = make_stream(seed, 0);
  std::vector<double> xs(static_cast<std::size_t>(samples));
  for (double& x : xs) {
    const int k = sample_poisson(lambda, rng);
    double best = 0.0;
    for (int i = 0; i < k; ++i) {
      const double gain = m.sample(rng) - sample_from(f, rng);
      if (i == 0 || gain > best) best = gain;
    }
    x = std::clamp(k == 0 ? 0.0 : best, 0.0, length);
  }
  std::sort(xs.begin(), xs.end());

  double ks = 0.0;
  const double total = samples;
  std::size_t i = 0;
  while (i < xs.size()) {
    const double v = xs[i];
    const double before = i / total;
    std::size_t j = i;
    while (j < xs.size() && xs[j] == v) ++j;
    const double after = j / total;
    const double g = eval(target, v);
    ks = std::max(ks, std::abs(after - g));
    if (v > 0.0) ks = std::max(ks, std::abs(before - g));
    i = j;
  }
  ks = std::max(ks, std::abs(1.0 - target[target.intervals()]));
  return ks;
}

}  // namespace expmap
