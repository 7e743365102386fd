#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "prodsys/model.hpp"
#include "prodsys/rng.hpp"

using namespace prodsys;

TEST_CASE("connected components of standard topologies") {
  SUBCASE("block diagonal two 2-blocks") {
    const Network n = Network::blocks(4, 2);
    const ComponentPartition p = connected_components(n);
    REQUIRE(p.components.size() == 2);
    CHECK(p.components[0] == std::vector<int>{0, 1});
    CHECK(p.components[1] == std::vector<int>{2, 3});
  }
  SUBCASE("zero matrix gives singletons") {
    const ComponentPartition p = connected_components(Network::none(3));
    CHECK(p.components.size() == 3);
  }
  SUBCASE("ring is one component") {
    const ComponentPartition p = connected_components(Network::ring(8));
    REQUIRE(p.components.size() == 1);
    CHECK(p.components[0].size() == 8);
  }
}

TEST_CASE("agent weights") {
  SUBCASE("ring column sums are 2") {
    const AgentWeights w = agent_weights(Network::ring(5));
    for (double a : w.alpha) CHECK(a == doctest::Approx(2.0));
    CHECK(w.mean == doctest::Approx(2.0));
  }
  SUBCASE("mean-field decomposition of a weighted chain") {
    // alpha = (1,2,3,4,5) reconstructed from a custom matrix with identity.
    std::vector<std::vector<double>> q(5, std::vector<double>(5, 0.0));
    // column sums of Q must be (0,1,2,3,4)
    q[0][1] = q[1][0] = 0.5;
    q[2][1] = q[1][2] = 0.5;
    q[2][3] = q[3][2] = 1.5;
    q[3][4] = q[4][3] = 1.5;
    q[0][2] = q[2][0] = 0.0;
    q[4][0] = q[0][4] = 0.5;
    q[1][3] = q[3][1] = 0.0;
    // columns: 0: 0.5+0.5=1.0 ... construct directly instead
    const Network n = Network::from_matrix(q, true);
    const AgentWeights w = agent_weights(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < w.alpha.size(); ++i) {
      CHECK(w.deviation[i] == doctest::Approx(w.mean - w.alpha[i]));
      sum += w.alpha[i];
    }
    CHECK(w.mean == doctest::Approx(sum / 5.0));
  }
  SUBCASE("identity network has unit weights") {
    const AgentWeights w = agent_weights(Network::none(4));
    for (double a : w.alpha) CHECK(a == 1.0);
    for (double d : w.deviation) CHECK(d == 0.0);
  }
}

TEST_CASE("alpha = (1..5) style deviations") {
  // delta_i = mean - alpha_i, per the weights convention used throughout.
  const std::vector<double> alpha = {1, 2, 3, 4, 5};
  const double mean = 3.0;
  const std::vector<double> expected = {2, 1, 0, -1, -2};
  for (std::size_t i = 0; i < alpha.size(); ++i)
    CHECK(mean - alpha[i] == doctest::Approx(expected[i]));
}

TEST_CASE("workload evaluation") {
  const Grid grid(512);
  SUBCASE("uniform") {
    const Workload w = Workload::uniform(1.0 / kTwoPi);
    const std::vector<double> v = workload_eval(w, grid);
    for (double x : v) CHECK(x == doctest::Approx(1.0 / kTwoPi));
  }
  SUBCASE("bimodal symmetry about pi") {
    const Workload w =
        Workload::mixture({{kPi / 2, 0.5, 0.5}, {3 * kPi / 2, 0.5, 0.5}});
    const std::vector<double> v = workload_eval(w, grid);
    for (int i = 1; i < 256; ++i) {
      // nodes i and 512 - i are mirror images about theta = pi (node 256)
      CHECK(v[static_cast<std::size_t>(i)] ==
            doctest::Approx(v[static_cast<std::size_t>(512 - i)]).epsilon(1e-10));
    }
  }
  SUBCASE("single mode mass equals its weight") {
    const Workload w = Workload::mixture({{1.0, 0.4, 0.7}});
    CHECK(integrate(workload_eval(w, grid), grid) == doctest::Approx(0.7).epsilon(1e-9));
  }
  SUBCASE("tabulated size must match") {
    const Workload w = Workload::tabulated(std::vector<double>(100, 1.0));
    CHECK_THROWS_AS(workload_eval(w, grid), std::invalid_argument);
  }
  SUBCASE("tabulated interpolation between nodes") {
    std::vector<double> table(4);
    table[0] = 1.0;
    table[1] = 2.0;
    table[2] = 3.0;
    table[3] = 2.0;
    const Workload w = Workload::tabulated(table);
    CHECK(w.eval(0.0) == doctest::Approx(1.0));
    CHECK(w.eval(kPi / 4) == doctest::Approx(1.5));  // halfway between nodes 0 and 1
  }
}

TEST_CASE("individual production equals the skill density") {
  const Grid grid(256);
  const AgentParams agent(Angle(2.2), 0.6);
  const std::vector<double> w = individual_production(agent, grid);
  for (int i = 0; i < 256; i += 17)
    CHECK(w[static_cast<std::size_t>(i)] ==
          wg_pdf(WrappedGaussian(agent.mu, agent.sigma), grid.node(i)));
  CHECK(integrate(w, grid) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("joint production matches the weighted matrix form") {
  const Grid grid(256);
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<AgentParams> agents;
    for (int i = 0; i < 4; ++i)
      agents.emplace_back(Angle(rng.uniform(0.0, kTwoPi)), rng.uniform(0.3, 1.5));
    const Network net = Network::complete(4);
    const ProductionSystem system(agents, net, 2.0);
    const JointProduction jp = joint_production(system, grid);
    const AgentWeights weights = agent_weights(net);
    for (int t = 0; t < 256; t += 31) {
      double expected = 0.0;
      for (int i = 0; i < 4; ++i)
        expected += weights.alpha[static_cast<std::size_t>(i)] *
                    wg_pdf(WrappedGaussian(agents[static_cast<std::size_t>(i)].mu,
                                           agents[static_cast<std::size_t>(i)].sigma),
                           grid.node(t)) /
                    system.resource;
      CHECK(jp.pooled[static_cast<std::size_t>(t)] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("joint production special cases") {
  const Grid grid(256);
  std::vector<AgentParams> agents = {{Angle(1.0), 0.5}, {Angle(3.0), 0.8}, {Angle(5.0), 1.1}};

  SUBCASE("no collaboration sums individual densities") {
    const ProductionSystem system(agents, Network::none(3), 1.0);
    const JointProduction jp = joint_production(system, grid);
    for (int t = 0; t < 256; t += 19) {
      double expected = 0.0;
      for (const auto& a : agents)
        expected += wg_pdf(WrappedGaussian(a.mu, a.sigma), grid.node(t));
      CHECK(jp.pooled[static_cast<std::size_t>(t)] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  SUBCASE("complete graph with identity multiplies by N") {
    const ProductionSystem system(agents, Network::complete(3), 1.0);
    const JointProduction jp = joint_production(system, grid);
    for (int t = 0; t < 256; t += 19) {
      double expected = 0.0;
      for (const auto& a : agents)
        expected += wg_pdf(WrappedGaussian(a.mu, a.sigma), grid.node(t));
      CHECK(jp.pooled[static_cast<std::size_t>(t)] == doctest::Approx(3.0 * expected).epsilon(1e-12));
    }
  }
  SUBCASE("ring without identity doubles the sum") {
    const ProductionSystem system(agents, Network::ring(3), 1.0);
    const JointProduction jp = joint_production(system, grid);
    for (int t = 0; t < 256; t += 19) {
      double expected = 0.0;
      for (const auto& a : agents)
        expected += wg_pdf(WrappedGaussian(a.mu, a.sigma), grid.node(t));
      CHECK(jp.pooled[static_cast<std::size_t>(t)] == doctest::Approx(2.0 * expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("component independence and resource action") {
  const Grid grid(128);
  std::vector<AgentParams> agents = {{Angle(0.5), 0.5}, {Angle(1.5), 0.5},
                                     {Angle(3.5), 0.7}, {Angle(4.5), 0.7}};
  const Network net = Network::blocks(4, 2);

  const JointProduction before = joint_production(ProductionSystem(agents, net, 1.0), grid);
  agents[0] = AgentParams(Angle(2.0), 1.2);
  const JointProduction after = joint_production(ProductionSystem(agents, net, 1.0), grid);
  // component B (agents 2, 3) untouched, bit identical
  for (int t = 0; t < 128; ++t)
    CHECK(before.per_component[1][static_cast<std::size_t>(t)] ==
          after.per_component[1][static_cast<std::size_t>(t)]);

  const JointProduction halved = joint_production(ProductionSystem(agents, net, 2.0), grid);
  for (int t = 0; t < 128; ++t)
    CHECK(halved.pooled[static_cast<std::size_t>(t)] ==
          doctest::Approx(0.5 * after.pooled[static_cast<std::size_t>(t)]).epsilon(1e-14));
}

TEST_CASE("network validation") {
  CHECK_THROWS_AS(Network::from_matrix({{0.0, 1.0}, {2.0, 0.0}}, true), std::invalid_argument);
  CHECK_THROWS_AS(Network::from_matrix({{1.0, 0.0}, {0.0, 0.0}}, true), std::invalid_argument);
  Network n = Network::none(3);
  CHECK_THROWS_AS(n.set_edge(1, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(n.set_edge(0, 1, -0.5), std::invalid_argument);
}

TEST_CASE("workload rotation shifts mixture centres") {
  const Workload w = Workload::mixture({{1.0, 0.4, 1.0}});
  const Workload r = w.rotated(0.5);
  CHECK(r.components[0].center == doctest::Approx(1.5));
  const Workload wrapped = w.rotated(kTwoPi);
  CHECK(wrapped.components[0].center == doctest::Approx(1.0));
}
