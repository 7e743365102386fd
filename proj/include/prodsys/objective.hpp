#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "prodsys/model.hpp"

namespace prodsys {

struct LossSpec {
  double p = 2.0;       // norm order, >= 1
  int grid_size = 512;  // quadrature resolution during optimisation
};

struct PenaltySpec {
  double lambda_c = 0.0;        // communication cost weight
  double lambda_s = 0.0;        // stiffness weight
  std::vector<Angle> prior_mu;  // one prior per agent, required when lambda_s > 0
};

struct OptimizerConfig {
  double learning_rate = 0.01;
  int max_steps = 5000;
  int patience = 100;
  double abs_tol = 1e-8;  // minimum improvement that resets the patience counter
  // The relative-undershoot integrand produces very large gradients from
  // poorly covering configurations; steps are rescaled so the gradient norm
  // seen by the update never exceeds this bound (<= 0 disables).
  double max_gradient_norm = 10.0;
  double sigma_floor = kSigmaFloor;
  std::uint64_t seed = 0;
  double init_mu_lo = 0.0;
  double init_mu_hi = kTwoPi;
  double init_sigma_lo = 0.3;
  double init_sigma_hi = 1.0;
  bool analytic_gradient = true;
  double fd_step = 1e-5;  // central-difference step for the fallback path
};

struct OptimizationResult {
  std::vector<AgentParams> final_agents;  // best-seen parameters
  double final_loss = 0.0;
  std::vector<double> loss_trace;  // loss at each evaluated step
  std::vector<double> best_trace;  // running best, non-increasing
  int steps_taken = 0;
  bool converged = false;
};

// Per-component p-norm of the relative undershoot (W0 - W1)/W1 where
// W0 > W1, with W1 the component production divided by the resource R.
double mismatch_loss(const ProductionSystem& system, const Workload& workload,
                     const LossSpec& spec);

// lambda_c * sum_ij Q_ij d(mu_i, mu_j) / sqrt(sigma_i^2 + sigma_j^2).
double communication_cost(const ProductionSystem& system, const PenaltySpec& penalties);

// (lambda_s / N) * sum_i d(mu_i, prior_i).
double stiffness_penalty(const ProductionSystem& system, const PenaltySpec& penalties);

double total_loss(const ProductionSystem& system, const Workload& workload, const LossSpec& spec,
                  const PenaltySpec& penalties);

// Gradient of the total loss, laid out as [dmu_0..dmu_{N-1}, dsigma_0..dsigma_{N-1}].
std::vector<double> gradient(const ProductionSystem& system, const Workload& workload,
                             const LossSpec& spec, const PenaltySpec& penalties);

std::vector<double> gradient_fd(const ProductionSystem& system, const Workload& workload,
                                const LossSpec& spec, const PenaltySpec& penalties,
                                double step = 1e-5);

// Reusable evaluation workspace for one (network, resource, workload,
// spec, penalties) configuration. Buffers are allocated once.
class LossEvaluator {
 public:
  LossEvaluator(const Network& network, double resource, const Workload& workload,
                const LossSpec& spec, const PenaltySpec& penalties);

  double value(const std::vector<AgentParams>& agents);
  double value_and_gradient(const std::vector<AgentParams>& agents, std::vector<double>& grad);
  double mismatch_only(const std::vector<AgentParams>& agents);

  const Grid& grid() const { return grid_; }

 private:
  double eval(const std::vector<AgentParams>& agents, std::vector<double>* grad, bool with_penalties);

  Network network_;
  double resource_;
  LossSpec spec_;
  PenaltySpec penalties_;
  Grid grid_;
  std::vector<double> w0_;
  ComponentPartition partition_;
  std::vector<double> alpha_;
  // scratch, sized N*L and L
  std::vector<double> pdf_, dmu_, dsig_, wc_, phi_;
};

// Mismatch loss of precomputed per-component production values against a
// demand sampled on the same grid.
double mismatch_from_values(std::span<const double> w0,
                            const std::vector<std::vector<double>>& component_production,
                            double spacing, double p);

// Plain gradient descent on (mu, sigma) from the system's current agents.
OptimizationResult optimize(const ProductionSystem& system, const Workload& workload,
                            const LossSpec& spec, const PenaltySpec& penalties,
                            const OptimizerConfig& config);

struct RunSpec {
  Network network = Network::none(1);
  double resource = 1.0;
  Workload workload;
  LossSpec loss;
  PenaltySpec penalties;
  OptimizerConfig config;
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;
  double standard_error = 0.0;
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
};

Aggregate aggregate(std::vector<double> values);

struct MonteCarloSummary {
  std::vector<OptimizationResult> runs;  // in seed order
  Aggregate loss;
  Aggregate heterogeneity;
  Aggregate specialisation;
  Aggregate productivity;
};

// Independent optimisations with seeds config.seed + 0 .. n_seeds - 1.
// Initial parameters are drawn from the config's init ranges.
MonteCarloSummary monte_carlo(const RunSpec& spec, int n_seeds, int threads = 1);

// Deterministic index-parallel loop; results must be written by index.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace prodsys
