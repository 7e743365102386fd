#pragma once

#include <cstdint>
#include <vector>

#include "prodsys/model.hpp"
#include "prodsys/objective.hpp"
#include "prodsys/rng.hpp"

namespace prodsys {

struct SpikeSpec {
  double time = 5.0;        // onset, in periods
  double duration = 0.5;    // in periods
  double amplitude = -1.0;  // density units; negative means "base workload maximum"
  double location = -1.0;   // fixed angle; negative means uniform-random per draw
  double spread = 0.25;
  int n_draws = 10;
};

struct EvolutionRegime {
  enum class Kind { wave, brownian, extreme };

  Kind kind = Kind::wave;
  double omega = kTwoPi;     // wave angular speed, rad per period
  double sigma_bm = 0.15;    // per-step random-walk scale
  double drift_omega = 0.0;  // extra wave drift on top of the random walk
  SpikeSpec spike;

  static EvolutionRegime wave(double omega = kTwoPi);
  static EvolutionRegime brownian(double sigma_bm = 0.15, double drift_omega = 0.0);
  static EvolutionRegime extreme(double sigma_bm = 0.15, SpikeSpec spike = {});
};

struct SeriesConfig {
  int steps = 1000;
  double periods = 10.0;
  int grid_size = 512;
  double p = 2.0;
  std::uint64_t seed = 0;
  bool cv_variance_over_mean = false;  // CV defaults to std/mean
};

// Task-centre offsets at each step, one entry per step starting at t = 0.
std::vector<double> regime_offsets(const EvolutionRegime& regime, const SeriesConfig& config,
                                   Rng& rng);

// Workload at time t (in periods). Random-walk regimes roll the walk
// forward from t = 0 at the series resolution, consuming the generator.
Workload task_at(const EvolutionRegime& regime, const Workload& base, double t, Rng& rng,
                 const SeriesConfig& config = {});

struct TimeSeries {
  std::vector<double> times;   // in periods
  std::vector<double> values;  // productivity 1 / (1 + mismatch)
};

// Productivity series of a fixed system against the evolving task. The
// extreme regime averages over spike.n_draws independent spike locations.
TimeSeries production_series(const ProductionSystem& system, const EvolutionRegime& regime,
                             const Workload& base, const SeriesConfig& config);

struct RobustnessStats {
  double mean = 0.0;
  double cv = 0.0;
  double minimum = 0.0;
};

RobustnessStats robustness_stats(const TimeSeries& series, bool cv_variance_over_mean = false);

}  // namespace prodsys
