#include "prodsys/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace prodsys {
namespace {

double spike_amplitude(const SpikeSpec& spike, const Workload& base, const Grid& grid) {
  if (spike.amplitude >= 0.0) return spike.amplitude;
  const std::vector<double> values = workload_eval(base, grid);
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, v);
  return peak;
}

}  // namespace

EvolutionRegime EvolutionRegime::wave(double omega) {
  EvolutionRegime r;
  r.kind = Kind::wave;
  r.omega = omega;
  return r;
}

EvolutionRegime EvolutionRegime::brownian(double sigma_bm, double drift_omega) {
  EvolutionRegime r;
  r.kind = Kind::brownian;
  r.sigma_bm = sigma_bm;
  r.drift_omega = drift_omega;
  return r;
}

EvolutionRegime EvolutionRegime::extreme(double sigma_bm, SpikeSpec spike) {
  EvolutionRegime r;
  r.kind = Kind::extreme;
  r.sigma_bm = sigma_bm;
  r.spike = spike;
  return r;
}

std::vector<double> regime_offsets(const EvolutionRegime& regime, const SeriesConfig& config,
                                   Rng& rng) {
  const int steps = config.steps;
  const double dt = config.periods / steps;
  std::vector<double> offsets(static_cast<std::size_t>(steps), 0.0);
  if (regime.kind == EvolutionRegime::Kind::wave) {
    for (int k = 0; k < steps; ++k) offsets[static_cast<std::size_t>(k)] = -regime.omega * k * dt;
    return offsets;
  }
  double walk = 0.0;
  for (int k = 0; k < steps; ++k) {
    offsets[static_cast<std::size_t>(k)] = walk - regime.drift_omega * k * dt;
    walk += regime.sigma_bm * rng.normal();
  }
  return offsets;
}

Workload task_at(const EvolutionRegime& regime, const Workload& base, double t, Rng& rng,
                 const SeriesConfig& config) {
  if (t < 0.0 || t > config.periods) throw std::invalid_argument("task_at: t outside the horizon");
  const double dt = config.periods / config.steps;
  const int step = std::min(config.steps - 1, static_cast<int>(t / dt));
  if (regime.kind == EvolutionRegime::Kind::wave) return base.rotated(-regime.omega * t);

  double walk = 0.0;
  for (int k = 0; k < step; ++k) walk += regime.sigma_bm * rng.normal();
  Workload task = base.rotated(walk - regime.drift_omega * t);
  if (regime.kind == EvolutionRegime::Kind::extreme && t >= regime.spike.time &&
      t < regime.spike.time + regime.spike.duration) {
    const Grid grid(config.grid_size);
    const double amp = spike_amplitude(regime.spike, base, grid);
    const double loc = regime.spike.location >= 0.0 ? regime.spike.location : rng.uniform(0.0, kTwoPi);
    if (amp > 0.0) {
      const double unit_peak = wg_extrema(WrappedGaussian(Angle(0.0), regime.spike.spread)).max_value;
      std::vector<WorkloadComponent> comps = task.components;
      comps.push_back({loc, regime.spike.spread, amp / unit_peak});
      return Workload::mixture(comps, task.uniform_level, task.name);
    }
  }
  return task;
}

TimeSeries production_series(const ProductionSystem& system, const EvolutionRegime& regime,
                             const Workload& base, const SeriesConfig& config) {
  const Grid grid(config.grid_size);
  const JointProduction jp = joint_production(system, grid);
  const double dt = config.periods / config.steps;

  Rng rng = derive_rng(config.seed, 0x5e71e5);
  const std::vector<double> offsets = regime_offsets(regime, config, rng);

  TimeSeries series;
  series.times.resize(static_cast<std::size_t>(config.steps));
  series.values.resize(static_cast<std::size_t>(config.steps));
  for (int k = 0; k < config.steps; ++k) {
    series.times[static_cast<std::size_t>(k)] = k * dt;
    const Workload task = base.rotated(offsets[static_cast<std::size_t>(k)]);
    const std::vector<double> w0 = workload_eval(task, grid);
    const double loss = mismatch_from_values(w0, jp.per_component, grid.spacing(), config.p);
    series.values[static_cast<std::size_t>(k)] = 1.0 / (1.0 + loss);
  }

  const double amp = regime.kind == EvolutionRegime::Kind::extreme
                         ? spike_amplitude(regime.spike, base, grid)
                         : 0.0;
  if (regime.kind == EvolutionRegime::Kind::extreme && amp > 0.0) {
    const double unit_peak = wg_extrema(WrappedGaussian(Angle(0.0), regime.spike.spread)).max_value;
    const int first = static_cast<int>(std::ceil(regime.spike.time / dt));
    const int last = std::min(config.steps,
                              static_cast<int>(std::ceil((regime.spike.time + regime.spike.duration) / dt)));
    std::vector<double> window_sum(static_cast<std::size_t>(std::max(0, last - first)), 0.0);
    for (int draw = 0; draw < regime.spike.n_draws; ++draw) {
      const double loc =
          regime.spike.location >= 0.0 ? regime.spike.location : rng.uniform(0.0, kTwoPi);
      for (int k = first; k < last; ++k) {
        Workload task = base.rotated(offsets[static_cast<std::size_t>(k)]);
        std::vector<WorkloadComponent> comps = task.components;
        comps.push_back({loc, regime.spike.spread, amp / unit_peak});
        task = Workload::mixture(comps, task.uniform_level, task.name);
        const std::vector<double> w0 = workload_eval(task, grid);
        const double loss = mismatch_from_values(w0, jp.per_component, grid.spacing(), config.p);
        window_sum[static_cast<std::size_t>(k - first)] += 1.0 / (1.0 + loss);
      }
    }
    for (int k = first; k < last; ++k)
      series.values[static_cast<std::size_t>(k)] =
          window_sum[static_cast<std::size_t>(k - first)] / regime.spike.n_draws;
  }
  return series;
}

RobustnessStats robustness_stats(const TimeSeries& series, bool cv_variance_over_mean) {
  const int n = static_cast<int>(series.values.size());
  if (n == 0) throw std::invalid_argument("robustness_stats: empty series");
  RobustnessStats s;
  double sum = 0.0;
  s.minimum = series.values.front();
  for (double v : series.values) {
    sum += v;
    s.minimum = std::min(s.minimum, v);
  }
  s.mean = sum / n;
  double ss = 0.0;
  for (double v : series.values) ss += (v - s.mean) * (v - s.mean);
  const double var = n > 1 ? ss / (n - 1) : 0.0;
  s.cv = s.mean != 0.0 ? (cv_variance_over_mean ? var : std::sqrt(var)) / s.mean : 0.0;
  return s;
}

}  // namespace prodsys
