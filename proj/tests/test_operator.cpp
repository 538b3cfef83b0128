#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "expmap/errors.hpp"
#include "expmap/operator.hpp"
#include "oracles.hpp"

using namespace expmap;

namespace {

constexpr int kGrid = 512;

// Psi F = c * int_0^1 F, a positive rank-one operator.
class MeanOperator final : public PositiveLinearOperator {
 public:
  MeanOperator(double c, int n) : c_(c), n_(n) {}
  Values apply(const Values& f) const override {
    return Values::Constant(f.size(), c_ * trapezoid(f, 1.0 / n_));
  }
  double sup_norm_bound() const override { return c_; }
  int intervals() const override { return n_; }
  double domain_length() const override { return 1.0; }

 private:
  double c_;
  int n_;
};

}  // namespace

TEST_CASE("phi examples") {
  const Measure u = Measure::uniform();
  CHECK((phi(u, GridFunction::zero(kGrid)) == 0.0).all());
  const Values p = phi(u, GridFunction::one(kGrid));
  for (int k = 0; k <= kGrid; ++k) CHECK(p[k] == doctest::Approx(1.0 - double(k) / kGrid));

  std::mt19937_64 rng(1);
  const GridFunction f = oracle::random_grid_cdf(rng, kGrid);
  const Values pd = phi(Measure::dirac(0.5), f);
  for (int k = 0; k <= kGrid; ++k) {
    const double x = double(k) / kGrid;
    CHECK(pd[k] == doctest::Approx(x <= 0.5 ? eval(f, 0.5 - x) : 0.0));
  }
}

TEST_CASE("phi matches fine quadrature for densities") {
  std::mt19937_64 rng(2);
  const Measure tri = Measure::tabulated({0.0, 0.3, 1.0}, {0.4 / 1.27, 2.0 / 1.27, 0.6 / 1.27});
  for (const Measure& m : {Measure::uniform(), tri}) {
    for (int t = 0; t < 3; ++t) {
      const auto fn = oracle::random_cdf(rng, 1.0, 0.05);
      const GridFunction f = GridFunction::from_function(2048, 1.0, fn);
      const Values p = phi(m, f);
      for (int k = 0; k <= 2048; k += 128) {
        const double x = k / 2048.0;
        CHECK(p[k] == doctest::Approx(oracle::phi_density(m, fn, x)).epsilon(2e-6));
      }
    }
  }
}

TEST_CASE("phi for the exponential measure") {
  const Measure e = Measure::exponential(1.0);
  const double L = e.grid_domain();
  const int n = 4096;
  const Values p = phi(e, GridFunction::one(n, L));
  for (int k = 0; k <= n; k += 256) CHECK(p[k] == doctest::Approx(std::exp(-L * k / n)));

  const double K = 0.8;
  const GridFunction f =
      GridFunction::from_function(n, L, [&](double x) { return std::exp(-K * std::exp(-x)); });
  const Values q = phi(e, f);
  const double mean = -std::expm1(-K) / K;
  for (int k = 0; k <= n; k += 256) {
    CHECK(q[k] == doctest::Approx(std::exp(-L * k / n) * mean).epsilon(1e-6));
  }
  CHECK_THROWS_AS(phi(e, GridFunction::one(n)), DomainError);
}

TEST_CASE("phi is positive, linear, nonincreasing and vanishes at 1") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const Measure m = oracle::random_measure(rng);
    const GridFunction f = oracle::random_grid_cdf(rng, kGrid);
    const GridFunction g = oracle::random_grid_cdf(rng, kGrid);
    const Values pf = phi(m, f);
    CHECK((pf >= 0.0).all());
    CHECK((pf <= 1.0 + 1e-12).all());
    CHECK(pf[kGrid] == 0.0);
    for (int k = 1; k <= kGrid; ++k) CHECK(pf[k] <= pf[k - 1] + 1e-12);
    const Values combo = 0.3 * f.values() - 1.7 * g.values();
    const Values lhs = phi_values(m, combo, 1.0);
    const Values rhs = 0.3 * pf - 1.7 * phi(m, g);
    CHECK((lhs - rhs).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("apply_T examples") {
  const ExpLinMap u1(1.0, Measure::uniform(), kGrid);
  const GridFunction one = apply_T(u1, u1.zero());
  CHECK((one.values() == 1.0).all());
  const GridFunction t = apply_T(u1, u1.one());
  for (int k = 0; k <= kGrid; ++k) {
    CHECK(t[k] == doctest::Approx(std::exp(-(1.0 - double(k) / kGrid))));
  }
  CHECK(t[0] == doctest::Approx(0.36788).epsilon(1e-5));
  CHECK(t.right_pinned());

  const ExpLinMap d(std::numbers::e, Measure::dirac(0.5), kGrid);
  const GridFunction f = GridFunction::from_function(
      kGrid, 1.0, [](double x) { return x <= 0.5 ? 1.0 / std::numbers::e : 1.0; });
  const GridFunction tf = apply_T(d, f);
  for (int k = 0; k <= kGrid; ++k) {
    if (std::abs(k - kGrid / 2) <= 1) continue;
    CHECK(tf[k] == doctest::Approx(f[k]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(apply_T(u1, GridFunction::one(kGrid / 2)), DomainError);
  CHECK_THROWS_AS(ExpLinMap(0.0, Measure::uniform()), DomainError);
  CHECK_THROWS_AS(ExpLinMap(-1.0, Measure::uniform()), DomainError);
}

TEST_CASE("order reversal, monotone square and Lipschitz bound") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const Measure m = oracle::random_measure(rng);
    const double lambda = 0.2 + 3.0 * u(rng);
    const ExpLinMap map(lambda, m, kGrid);
    const GridFunction f = oracle::random_grid_cdf(rng, kGrid);
    const double c = u(rng);
    const GridFunction g(f.values() + c * (1.0 - f.values()));
    const GridFunction tf = apply_T(map, f);
    const GridFunction tg = apply_T(map, g);
    CHECK((tf.values() >= tg.values() - 1e-12).all());
    CHECK((apply_T(map, tf).values() <= apply_T(map, tg).values() + 1e-12).all());
    CHECK(sup_distance(tf, tg) <= lambda * sup_distance(f, g) + 1e-12);
    CHECK(tf.right_pinned());
  }
}

TEST_CASE("derivative of T matches finite differences with a negative sign") {
  std::mt19937_64 rng(5);
  const double s = 1e-6;
  for (int t = 0; t < 10; ++t) {
    const Measure m = oracle::random_measure(rng);
    const ExpLinMap map(1.5, m, kGrid);
    const GridFunction f = oracle::random_grid_cdf(rng, kGrid, 1.0, 0.1);
    const Values h = oracle::random_grid_cdf(rng, kGrid).values();
    const Values fd = (apply_T_values(map, f.values() + s * h).values() -
                       apply_T(map, f).values()) / s;
    const Values dt = derivative_T(map, f, h);
    CHECK((fd - dt).abs().maxCoeff() < 1e-4);
    CHECK((dt <= 0.0).all());
    const Values magnitude = apply_T(map, f).values() * map.psi().apply(h).abs();
    CHECK((dt.abs() - magnitude).abs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("generic positive operators plug into the map") {
  auto psi = std::make_shared<MeanOperator>(2.0, 64);
  const ExpLinMap map(psi);
  CHECK(map.kappa() == doctest::Approx(2.0 / std::numbers::e));
  const GridFunction t = apply_T(map, map.one());
  CHECK(t[0] == doctest::Approx(std::exp(-2.0)));
  CHECK(t[64] == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("adjoint defect") {
  std::mt19937_64 rng(6);
  const GridFunction f = oracle::random_grid_cdf(rng, 2048);
  const GridFunction g = oracle::random_grid_cdf(rng, 2048);
  CHECK(adjoint_defect(Measure::atoms({{0.3, 0.5}, {0.6, 0.5}}), f, f) == 0.0);
  CHECK(adjoint_defect(Measure::uniform(), GridFunction::one(2048), GridFunction::one(2048)) <
        1e-12);
  CHECK(adjoint_defect(Measure::dirac(0.0), f, g) < 1e-12);
  for (int t = 0; t < 15; ++t) {
    const Measure m = oracle::random_measure(rng);
    const GridFunction a = oracle::random_grid_cdf(rng, 2048);
    const GridFunction b = oracle::random_grid_cdf(rng, 2048);
    CHECK(adjoint_defect(m, a, b) <= 1e-4);
  }
  CHECK_THROWS_AS(adjoint_defect(Measure::exponential(1.0), f, g), DomainError);
}

TEST_CASE("norm probe") {
  const NormRatios r = norm_probe(Measure::uniform(), GridFunction::one(kGrid));
  CHECK(r.sup_ratio == doctest::Approx(1.0));
  CHECK(r.l1_ratio == doctest::Approx(0.5));

  const Measure near_one = Measure::atoms({{0.2, 0.5}, {0.999, 0.5}});
  const GridFunction spike =
      GridFunction::from_function(2048, 1.0, [](double x) { return x > 0.98 ? 1.0 : 0.0; });
  CHECK(norm_probe(near_one, spike).l1_ratio <= 1.0);

  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const Measure m = oracle::random_measure(rng);
    const NormRatios q = norm_probe(m, oracle::random_grid_cdf(rng, kGrid));
    CHECK(q.sup_ratio <= 1.0 + 1e-9);
    CHECK(q.l1_ratio <= 1.0 + 1e-9);
  }
  CHECK_THROWS_AS(norm_probe(Measure::uniform(), GridFunction::zero(kGrid)), DomainError);
}

TEST_CASE("contraction probe") {
  std::mt19937_64 rng(8);
  const ExpLinMap map(2.0, Measure::uniform(), kGrid);
  for (int t = 0; t < 10; ++t) {
    const GridFunction f = oracle::random_grid_cdf(rng, kGrid, 1.0, 0.05);
    const Values h = oracle::random_grid_cdf(rng, kGrid).values() - 0.5;
    CHECK(contraction_ratio_probe(map, f, h, 1e-3) <= 2.0 / std::numbers::e + 1e-3);
  }

  const ExpLinMap dirac(1.0, Measure::dirac(0.5), kGrid);
  const double r = contraction_ratio_probe(dirac, dirac.one(), Values::Ones(kGrid + 1), 1e-3);
  CHECK(r <= 1.0 / std::numbers::e + 1e-3);
  CHECK(r == doctest::Approx(oracle::kDiracContraction_1).epsilon(1e-2));

  const GridFunction f = map.one();
  CHECK_THROWS_AS(contraction_ratio_probe(map, f, Values::Zero(kGrid + 1), 1e-3), DomainError);
  CHECK_THROWS_AS(contraction_ratio_probe(map, f, Values::Ones(kGrid + 1), 0.0), DomainError);
  Values down = Values::LinSpaced(kGrid + 1, 1.0, 0.0);
  CHECK_THROWS_AS(contraction_ratio_probe(map, f, down, 1e-3), DomainError);
  CHECK_THROWS_AS(contraction_ratio_probe(map, map.zero(), -Values::Ones(kGrid + 1), 1e-3),
                  DomainError);
}
