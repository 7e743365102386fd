#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "prodsys/dynamics.hpp"

using namespace prodsys;

namespace {

ProductionSystem pair_system(double mu1, double mu2) {
  return ProductionSystem({{Angle(mu1), 0.5}, {Angle(mu2), 0.5}}, Network::ring(2), 4.0);
}

}  // namespace

TEST_CASE("task_at under the wave regime") {
  const Workload base = Workload::mixture({{kPi, 0.5, 1.0}});
  Rng rng(1);
  SUBCASE("one full period wraps back to the start") {
    const Workload at_zero = task_at(EvolutionRegime::wave(), base, 0.0, rng);
    const Workload at_one = task_at(EvolutionRegime::wave(), base, 1.0, rng);
    CHECK(at_one.components[0].center ==
          doctest::Approx(at_zero.components[0].center).epsilon(1e-12));
  }
  SUBCASE("quarter period shifts by -pi/2") {
    const Workload w = task_at(EvolutionRegime::wave(), base, 0.25, rng);
    CHECK(w.components[0].center == doctest::Approx(kPi / 2).epsilon(1e-12));
  }
  SUBCASE("zero-noise random walk stays put") {
    const Workload w = task_at(EvolutionRegime::brownian(0.0), base, 3.7, rng);
    CHECK(w.components[0].center == doctest::Approx(kPi).epsilon(1e-12));
  }
}

TEST_CASE("production series properties") {
  const Workload base = Workload::mixture({{kPi, 0.5, 1.0}});
  SeriesConfig config;
  config.steps = 200;
  config.grid_size = 256;
  config.seed = 5;

  SUBCASE("an always-covering system produces 1 throughout") {
    // Massive capacity: production dominates the demand at every step.
    const ProductionSystem big({{Angle(0.0), 2.0}, {Angle(kPi), 2.0}}, Network::ring(2), 0.05);
    const TimeSeries s = production_series(big, EvolutionRegime::wave(), base, config);
    for (double v : s.values) CHECK(v == doctest::Approx(1.0));
  }
  SUBCASE("wave periodicity") {
    const ProductionSystem sys = pair_system(kPi / 2, 3 * kPi / 2);
    SeriesConfig pc = config;
    pc.steps = 400;  // 40 steps per period
    const TimeSeries s = production_series(sys, EvolutionRegime::wave(), base, pc);
    const int per_period = 40;
    for (int k = 0; k + per_period < pc.steps; k += 7)
      CHECK(s.values[static_cast<std::size_t>(k)] ==
            doctest::Approx(s.values[static_cast<std::size_t>(k + per_period)]).epsilon(1e-10));
  }
  SUBCASE("deterministic under a fixed seed") {
    const ProductionSystem sys = pair_system(kPi, kPi);
    const TimeSeries a = production_series(sys, EvolutionRegime::brownian(), base, config);
    const TimeSeries b = production_series(sys, EvolutionRegime::brownian(), base, config);
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
  }
  SUBCASE("zero-amplitude extreme equals plain brownian pathwise") {
    const ProductionSystem sys = pair_system(kPi, kPi);
    SpikeSpec spike;
    spike.amplitude = 0.0;
    const TimeSeries bm = production_series(sys, EvolutionRegime::brownian(), base, config);
    const TimeSeries ex =
        production_series(sys, EvolutionRegime::extreme(0.15, spike), base, config);
    for (std::size_t i = 0; i < bm.values.size(); ++i) CHECK(bm.values[i] == ex.values[i]);
  }
  SUBCASE("extreme series averages the single-draw series") {
    const ProductionSystem sys = pair_system(kPi / 2, 3 * kPi / 2);
    SpikeSpec spike;
    spike.n_draws = 4;
    const TimeSeries averaged =
        production_series(sys, EvolutionRegime::extreme(0.15, spike), base, config);
    // fixed-location draws reproduce each single-draw series; their mean
    // must match the uniform-draw average only in expectation, so check the
    // internal consistency instead: a 1-draw fixed-location regime equals
    // the same run repeated.
    SpikeSpec fixed = spike;
    fixed.n_draws = 1;
    fixed.location = 1.0;
    const TimeSeries one =
        production_series(sys, EvolutionRegime::extreme(0.15, fixed), base, config);
    SpikeSpec repeated = fixed;
    repeated.n_draws = 3;  // same fixed location three times
    const TimeSeries three =
        production_series(sys, EvolutionRegime::extreme(0.15, repeated), base, config);
    for (std::size_t i = 0; i < one.values.size(); ++i)
      CHECK(one.values[i] == doctest::Approx(three.values[i]).epsilon(1e-14));
    CHECK(averaged.values.size() == one.values.size());
  }
  SUBCASE("single-step horizon") {
    SeriesConfig tiny = config;
    tiny.steps = 1;
    const ProductionSystem sys = pair_system(kPi, kPi);
    const TimeSeries s = production_series(sys, EvolutionRegime::wave(), base, tiny);
    REQUIRE(s.values.size() == 1);
    const RobustnessStats st = robustness_stats(s);
    CHECK(st.mean == s.values[0]);
    CHECK(st.minimum == s.values[0]);
  }
}

TEST_CASE("heterogeneous pair rides the wave better than a homogeneous pair") {
  const Workload base = Workload::mixture({{kPi, 0.5, 1.0}});
  SeriesConfig config;
  config.steps = 500;
  config.grid_size = 256;
  const TimeSeries homo =
      production_series(pair_system(kPi, kPi), EvolutionRegime::wave(), base, config);
  const TimeSeries hetero =
      production_series(pair_system(kPi / 2, 3 * kPi / 2), EvolutionRegime::wave(), base, config);
  const RobustnessStats sh = robustness_stats(homo);
  const RobustnessStats se = robustness_stats(hetero);
  CHECK(se.mean > sh.mean);
  CHECK(se.cv < sh.cv);
}

TEST_CASE("robustness statistics") {
  SUBCASE("constant series") {
    TimeSeries s;
    s.times = {0.0, 0.1, 0.2};
    s.values = {0.4, 0.4, 0.4};
    const RobustnessStats r = robustness_stats(s);
    CHECK(r.mean == doctest::Approx(0.4));
    CHECK(r.cv == doctest::Approx(0.0));
    CHECK(r.minimum == doctest::Approx(0.4));
  }
  SUBCASE("two-point series") {
    TimeSeries s;
    s.times = {0.0, 0.5};
    s.values = {0.2, 0.4};
    const RobustnessStats r = robustness_stats(s);
    CHECK(r.mean == doctest::Approx(0.3));
    CHECK(r.minimum == doctest::Approx(0.2));
  }
  SUBCASE("variance-over-mean option") {
    TimeSeries s;
    s.times = {0, 1, 2, 3};
    s.values = {0.1, 0.3, 0.2, 0.4};
    const RobustnessStats std_cv = robustness_stats(s, false);
    const RobustnessStats var_cv = robustness_stats(s, true);
    // var/mean = (std/mean)^2 * mean
    CHECK(var_cv.cv == doctest::Approx(std_cv.cv * std_cv.cv * std_cv.mean).epsilon(1e-12));
  }
  SUBCASE("empty series is rejected") {
    CHECK_THROWS_AS(robustness_stats(TimeSeries{}), std::invalid_argument);
  }
}
