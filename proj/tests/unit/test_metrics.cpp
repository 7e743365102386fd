#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "prodsys/metrics.hpp"
#include "prodsys/rng.hpp"

using namespace prodsys;

TEST_CASE("specialisation is inverse breadth") {
  CHECK(specialisation(AgentParams(Angle(0.0), 0.5)) == doctest::Approx(2.0));
  CHECK(specialisation_mean({{Angle(0.0), 1.0}, {Angle(1.0), 2.0}}) == doctest::Approx(0.75));
  CHECK(specialisation(AgentParams(Angle(0.0), 10.0)) == doctest::Approx(0.1));
}

TEST_CASE("similarity kernel") {
  const AgentParams a(Angle(0.0), 0.5);
  const AgentParams b(Angle(kPi), 0.5);
  CHECK(similarity(a, a) == doctest::Approx(1.0));
  // Frozen: exp(-pi / sqrt(0.5))
  CHECK(similarity(a, b) == doctest::Approx(0.011761980531389124).epsilon(1e-12));
  CHECK(similarity(a, b) == doctest::Approx(similarity(b, a)));
}

TEST_CASE("similarity decreases with distance and raises heterogeneity") {
  const AgentParams base(Angle(1.0), 0.6);
  double prev_z = 1.0;
  double prev_h = 0.0;
  for (double d : {0.3, 0.8, 1.5, 2.5, 3.1}) {
    const AgentParams other(Angle(1.0 + d), 0.6);
    const double z = similarity(base, other);
    CHECK(z < prev_z);
    const double h = heterogeneity({base, other});
    CHECK(h >= prev_h);
    prev_z = z;
    prev_h = h;
  }
}

TEST_CASE("heterogeneity closed forms") {
  SUBCASE("identical agents score zero for any N") {
    for (int n : {1, 2, 5, 17}) {
      std::vector<AgentParams> agents(static_cast<std::size_t>(n), AgentParams(Angle(2.0), 0.7));
      CHECK(heterogeneity(agents) == doctest::Approx(0.0).epsilon(1e-14));
    }
  }
  SUBCASE("two agents give 2/(1+z) - 1") {
    const AgentParams a(Angle(0.5), 0.4);
    const AgentParams b(Angle(2.5), 0.9);
    const double z = similarity(a, b);
    CHECK(heterogeneity({a, b}) == doctest::Approx(2.0 / (1.0 + z) - 1.0).epsilon(1e-14));
  }
  SUBCASE("reduced-form three-agent example") {
    // two maximally similar agents plus one dissimilar: 1/(p^T Z p) - 1 with
    // p = (2/3, 1/3) and identity reduced matrix gives 9/5 - 1 = 0.8.
    SimilarityMatrix z;
    z.size = 3;
    z.z = {1, 1, 0, 1, 1, 0, 0, 0, 1};
    const double d = diversity_q(z, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 2.0);
    CHECK(d - 1.0 == doctest::Approx(0.8).epsilon(1e-12));
  }
}

TEST_CASE("clone dilution decreases heterogeneity toward zero") {
  const AgentParams a(Angle(0.0), 0.5);
  const AgentParams b(Angle(2.0), 0.5);
  const double z = similarity(a, b);
  double prev = heterogeneity({a, b});
  for (int k = 1; k <= 12; ++k) {
    std::vector<AgentParams> agents = {b};
    for (int i = 0; i < k; ++i) agents.push_back(a);
    // agents: one of type b plus k clones of a; k pairs with similarity z
    const double direct = heterogeneity(agents);
    const double formula = 1.0 / (1.0 - 2.0 * k * (1.0 - z) / ((k + 1.0) * (k + 1.0))) - 1.0;
    CHECK(direct == doctest::Approx(formula).epsilon(1e-12));
    if (k > 1) CHECK(direct < prev);
    prev = direct;
  }
}

TEST_CASE("heterogeneity bounds and permutation symmetry") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + rng.uniform_int(6);
    std::vector<AgentParams> agents;
    for (int i = 0; i < n; ++i)
      agents.emplace_back(Angle(rng.uniform(0.0, kTwoPi)), rng.uniform(0.1, 3.0));
    const double h = heterogeneity(agents);
    CHECK(h >= 0.0);
    CHECK(h < n - 1);  // strict: the kernel is strictly positive
    std::vector<AgentParams> shuffled = agents;
    std::swap(shuffled[0], shuffled[static_cast<std::size_t>(n - 1)]);
    CHECK(heterogeneity(shuffled) == doctest::Approx(h).epsilon(1e-14));
  }
}

TEST_CASE("diversity_q normalization and limits") {
  SUBCASE("identity similarity with uniform abundances gives N") {
    for (int n : {2, 4, 7}) {
      SimilarityMatrix z;
      z.size = n;
      z.z.assign(static_cast<std::size_t>(n) * n, 0.0);
      for (int i = 0; i < n; ++i) z.z[static_cast<std::size_t>(i * n + i)] = 1.0;
      const std::vector<double> p(static_cast<std::size_t>(n), 1.0 / n);
      for (double q : {0.0, 0.5, 1.0, 2.0}) {
        CHECK(diversity_q(z, p, q) == doctest::Approx(static_cast<double>(n)).epsilon(1e-12));
      }
      CHECK(diversity_q(z, p, kDiversityInfinity) == doctest::Approx(static_cast<double>(n)));
    }
  }
  SUBCASE("q = 2 equals 1/(p^T Z p)") {
    SimilarityMatrix z;
    z.size = 3;
    z.z = {1.0, 0.5, 0.2, 0.5, 1.0, 0.7, 0.2, 0.7, 1.0};
    const std::vector<double> p = {0.2, 0.3, 0.5};
    double quad = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        quad += p[static_cast<std::size_t>(i)] * z.at(i, j) * p[static_cast<std::size_t>(j)];
    CHECK(diversity_q(z, p, 2.0) == doctest::Approx(1.0 / quad).epsilon(1e-12));
  }
  SUBCASE("continuity at q = 1") {
    SimilarityMatrix z;
    z.size = 4;
    z.z = {1.0, 0.3, 0.6, 0.1, 0.3, 1.0, 0.4, 0.8, 0.6, 0.4, 1.0, 0.2, 0.1, 0.8, 0.2, 1.0};
    const std::vector<double> p = {0.1, 0.2, 0.3, 0.4};
    const double at_one = diversity_q(z, p, 1.0);
    CHECK(diversity_q(z, p, 1.0 + 1e-6) == doctest::Approx(at_one).epsilon(1e-4));
    CHECK(diversity_q(z, p, 1.0 - 1e-6) == doctest::Approx(at_one).epsilon(1e-4));
  }
  SUBCASE("expandability: zero-abundance elements are invisible") {
    SimilarityMatrix z2;
    z2.size = 2;
    z2.z = {1.0, 0.4, 0.4, 1.0};
    SimilarityMatrix z3;
    z3.size = 3;
    z3.z = {1.0, 0.4, 0.9, 0.4, 1.0, 0.1, 0.9, 0.1, 1.0};
    const std::vector<double> p2 = {0.6, 0.4};
    const std::vector<double> p3 = {0.6, 0.4, 0.0};
    for (double q : {0.0, 0.5, 1.0, 2.0, 5.0})
      CHECK(diversity_q(z3, p3, q) == doctest::Approx(diversity_q(z2, p2, q)).epsilon(1e-12));
    CHECK(diversity_q(z3, p3, kDiversityInfinity) ==
          doctest::Approx(diversity_q(z2, p2, kDiversityInfinity)));
  }
}

TEST_CASE("production measures and the decomposition") {
  const Grid grid(2048);
  SUBCASE("exact cover has no overproduction") {
    const ProductionSystem system({{Angle(kPi), 0.5}}, Network::none(1), 1.0);
    const Workload w0 = Workload::mixture({{kPi, 0.5, 1.0}});
    const ProductionMeasures m = production_measures(system, w0, grid);
    CHECK(m.overproduction == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(m.effective == doctest::Approx(m.production).epsilon(1e-10));
  }
  SUBCASE("zero demand makes everything overproduction") {
    const ProductionSystem system({{Angle(kPi), 0.5}}, Network::none(1), 1.0);
    const Workload w0 = Workload::uniform(0.0);
    const ProductionMeasures m = production_measures(system, w0, grid);
    CHECK(m.effective == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(m.overproduction == doctest::Approx(m.production).epsilon(1e-12));
  }
  SUBCASE("half-height demand absorbs half the mass") {
    // W0 = half of the system's own density: P = 1, P_eff = 0.5.
    const ProductionSystem system({{Angle(kPi), 0.5}}, Network::none(1), 1.0);
    const Workload w0 = Workload::mixture({{kPi, 0.5, 0.5}});
    const ProductionMeasures m = production_measures(system, w0, grid);
    CHECK(m.production == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(m.effective == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("random systems satisfy P = P_eff + P_over") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<AgentParams> agents;
      const int n = 1 + rng.uniform_int(5);
      for (int i = 0; i < n; ++i)
        agents.emplace_back(Angle(rng.uniform(0.0, kTwoPi)), rng.uniform(0.2, 2.0));
      const ProductionSystem system(agents, Network::ring(n), rng.uniform(0.5, 8.0));
      const Workload w0 = Workload::mixture({{rng.uniform(0.0, kTwoPi), 0.5, 1.0}});
      const ProductionMeasures m = production_measures(system, w0, grid);
      CHECK(m.production == doctest::Approx(m.effective + m.overproduction).epsilon(1e-9));
    }
  }
}

TEST_CASE("productivity index") {
  CHECK(productivity(0.0) == doctest::Approx(1.0));
  CHECK(productivity(1.0) == doctest::Approx(0.5));
  double prev = 1.0;
  for (double loss : {0.1, 1.0, 10.0, 1e4}) {
    const double p = productivity(loss);
    CHECK(p < prev);
    CHECK(p > 0.0);
    prev = p;
  }
  CHECK_THROWS_AS(productivity(-0.1), std::invalid_argument);
}

TEST_CASE("efficacy and efficiency ratios") {
  const EfficacyEfficiency e = efficacy_efficiency(2.0, 1.0, 4);
  CHECK(e.efficacy == doctest::Approx(0.5));
  CHECK(e.efficiency == doctest::Approx(0.25));
  const EfficacyEfficiency zero = efficacy_efficiency(1.0, 0.0, 3);
  CHECK(zero.efficacy == 0.0);
  CHECK(zero.efficiency == 0.0);
  CHECK_THROWS_AS(efficacy_efficiency(0.0, 0.0, 2), std::invalid_argument);
}

TEST_CASE("metrics report ties the pieces together") {
  const ProductionSystem system({{Angle(1.0), 0.5}, {Angle(4.0), 0.8}}, Network::ring(2), 2.0);
  const Workload w0 = Workload::mixture({{1.0, 0.5, 0.5}, {4.0, 0.5, 0.5}});
  const MetricsReport r = metrics_report(system, w0, Grid(2048), 0.25);
  CHECK(r.production == doctest::Approx(r.effective_production + r.overproduction).epsilon(1e-9));
  CHECK(r.productivity == doctest::Approx(1.0 / 1.25));
  CHECK(r.efficacy >= 0.0);
  CHECK(r.efficacy <= 1.0);
  CHECK(r.heterogeneity > 0.0);
}
