#include "prodsys/objective.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "prodsys/metrics.hpp"
#include "prodsys/rng.hpp"

namespace prodsys {
namespace {

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void check_penalties(const PenaltySpec& penalties, int n) {
  if (penalties.lambda_s > 0.0 && static_cast<int>(penalties.prior_mu.size()) != n)
    throw std::invalid_argument("stiffness penalty requires one prior per agent");
  if (penalties.lambda_c < 0.0 || penalties.lambda_s < 0.0)
    throw std::invalid_argument("penalty weights must be non-negative");
}

}  // namespace

LossEvaluator::LossEvaluator(const Network& network, double resource, const Workload& workload,
                             const LossSpec& spec, const PenaltySpec& penalties)
    : network_(network),
      resource_(resource),
      spec_(spec),
      penalties_(penalties),
      grid_(spec.grid_size),
      partition_(connected_components(network)),
      alpha_(agent_weights(network).alpha) {
  if (spec.p < 1.0) throw std::invalid_argument("LossSpec: p must be >= 1");
  if (!(resource > 0.0)) throw std::invalid_argument("LossEvaluator: resource must be positive");
  check_penalties(penalties, network.size());
  w0_ = workload_eval(workload, grid_);
  const std::size_t n = static_cast<std::size_t>(network.size());
  const std::size_t L = static_cast<std::size_t>(grid_.size());
  pdf_.resize(n * L);
  dmu_.resize(n * L);
  dsig_.resize(n * L);
  wc_.resize(L);
  phi_.resize(L);
}

double LossEvaluator::eval(const std::vector<AgentParams>& agents, std::vector<double>* grad,
                           bool with_penalties) {
  const int n = network_.size();
  const int L = grid_.size();
  if (static_cast<int>(agents.size()) != n)
    throw std::invalid_argument("LossEvaluator: agent count mismatch");
  const double dtheta = grid_.spacing();
  const double p = spec_.p;
  const bool want_grad = grad != nullptr;
  if (want_grad) grad->assign(static_cast<std::size_t>(2 * n), 0.0);

  for (int i = 0; i < n; ++i) {
    const std::size_t off = static_cast<std::size_t>(i) * L;
    std::span<double> pdf(pdf_.data() + off, static_cast<std::size_t>(L));
    if (want_grad) {
      wg_eval_grid(WrappedGaussian(agents[static_cast<std::size_t>(i)].mu,
                                   agents[static_cast<std::size_t>(i)].sigma),
                   grid_, pdf, {dmu_.data() + off, static_cast<std::size_t>(L)},
                   {dsig_.data() + off, static_cast<std::size_t>(L)});
    } else {
      wg_eval_grid(WrappedGaussian(agents[static_cast<std::size_t>(i)].mu,
                                   agents[static_cast<std::size_t>(i)].sigma),
                   grid_, pdf);
    }
  }

  double loss = 0.0;
  for (const auto& comp : partition_.components) {
    std::fill(wc_.begin(), wc_.end(), 0.0);
    for (int i : comp) {
      const double scale = alpha_[static_cast<std::size_t>(i)] / resource_;
      const double* pdf = pdf_.data() + static_cast<std::size_t>(i) * L;
      for (int t = 0; t < L; ++t) wc_[static_cast<std::size_t>(t)] += scale * pdf[t];
    }
    // F = integral of the p-th power of the relative undershoot.
    double f = 0.0;
    if (p == 2.0) {
      for (int t = 0; t < L; ++t) {
        const double w1 = wc_[static_cast<std::size_t>(t)];
        const double g = (w0_[static_cast<std::size_t>(t)] - w1) / w1;
        if (g > 0.0) {
          f += g * g;
          phi_[static_cast<std::size_t>(t)] = g * w0_[static_cast<std::size_t>(t)] / (w1 * w1);
        } else {
          phi_[static_cast<std::size_t>(t)] = 0.0;
        }
      }
    } else {
      for (int t = 0; t < L; ++t) {
        const double w1 = wc_[static_cast<std::size_t>(t)];
        const double g = (w0_[static_cast<std::size_t>(t)] - w1) / w1;
        if (g > 0.0) {
          f += std::pow(g, p);
          phi_[static_cast<std::size_t>(t)] =
              std::pow(g, p - 1.0) * w0_[static_cast<std::size_t>(t)] / (w1 * w1);
        } else {
          phi_[static_cast<std::size_t>(t)] = 0.0;
        }
      }
    }
    f *= dtheta;
    if (f <= 0.0) continue;  // fully covered component: flat region, zero subgradient
    loss += std::pow(f, 1.0 / p);
    if (want_grad) {
      const double scale_f = std::pow(f, 1.0 / p - 1.0) * dtheta;
      for (int i : comp) {
        const std::size_t off = static_cast<std::size_t>(i) * L;
        double smu = 0.0, ssig = 0.0;
        for (int t = 0; t < L; ++t) {
          smu += phi_[static_cast<std::size_t>(t)] * dmu_[off + static_cast<std::size_t>(t)];
          ssig += phi_[static_cast<std::size_t>(t)] * dsig_[off + static_cast<std::size_t>(t)];
        }
        const double w = alpha_[static_cast<std::size_t>(i)] / resource_;
        (*grad)[static_cast<std::size_t>(i)] -= scale_f * w * smu;
        (*grad)[static_cast<std::size_t>(n + i)] -= scale_f * w * ssig;
      }
    }
  }

  if (!with_penalties) return loss;

  if (penalties_.lambda_c > 0.0) {
    const double lc = penalties_.lambda_c;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double qij = network_.q(i, j);
        if (qij == 0.0) continue;
        const auto& ai = agents[static_cast<std::size_t>(i)];
        const auto& aj = agents[static_cast<std::size_t>(j)];
        const double s2 = ai.sigma * ai.sigma + aj.sigma * aj.sigma;
        const double s = std::sqrt(s2);
        const double diff = circ_signed(ai.mu.value(), aj.mu.value());
        const double d = std::fabs(diff);
        loss += lc * qij * d / s;  // one term per unordered pair
        if (grad) {
          const double gmu = lc * qij * sign_of(diff) / s;
          (*grad)[static_cast<std::size_t>(i)] += gmu;
          (*grad)[static_cast<std::size_t>(j)] -= gmu;
          const double base = -lc * qij * d / (s2 * s);
          (*grad)[static_cast<std::size_t>(n + i)] += base * ai.sigma;
          (*grad)[static_cast<std::size_t>(n + j)] += base * aj.sigma;
        }
      }
    }
  }

  if (penalties_.lambda_s > 0.0) {
    const double ls = penalties_.lambda_s / n;
    for (int i = 0; i < n; ++i) {
      const double diff = circ_signed(agents[static_cast<std::size_t>(i)].mu.value(),
                                      penalties_.prior_mu[static_cast<std::size_t>(i)].value());
      loss += ls * std::fabs(diff);
      if (grad) (*grad)[static_cast<std::size_t>(i)] += ls * sign_of(diff);
    }
  }

  return loss;
}

double LossEvaluator::value(const std::vector<AgentParams>& agents) {
  return eval(agents, nullptr, true);
}

double LossEvaluator::value_and_gradient(const std::vector<AgentParams>& agents,
                                         std::vector<double>& grad) {
  return eval(agents, &grad, true);
}

double LossEvaluator::mismatch_only(const std::vector<AgentParams>& agents) {
  return eval(agents, nullptr, false);
}

double mismatch_loss(const ProductionSystem& system, const Workload& workload,
                     const LossSpec& spec) {
  LossEvaluator ev(system.network, system.resource, workload, spec, PenaltySpec{});
  return ev.mismatch_only(system.agents);
}

double communication_cost(const ProductionSystem& system, const PenaltySpec& penalties) {
  check_penalties(penalties, system.size());
  if (penalties.lambda_c == 0.0) return 0.0;
  double cost = 0.0;
  const int n = system.size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double qij = system.network.q(i, j);
      if (qij == 0.0) continue;
      const auto& ai = system.agents[static_cast<std::size_t>(i)];
      const auto& aj = system.agents[static_cast<std::size_t>(j)];
      cost += qij * circ_dist(ai.mu, aj.mu) /
              std::sqrt(ai.sigma * ai.sigma + aj.sigma * aj.sigma);
    }
  return penalties.lambda_c * cost;
}

double stiffness_penalty(const ProductionSystem& system, const PenaltySpec& penalties) {
  if (penalties.lambda_s == 0.0) return 0.0;
  const int n = system.size();
  check_penalties(penalties, n);
  double cost = 0.0;
  for (int i = 0; i < n; ++i)
    cost += circ_dist(system.agents[static_cast<std::size_t>(i)].mu,
                      penalties.prior_mu[static_cast<std::size_t>(i)]);
  return penalties.lambda_s / n * cost;
}

double total_loss(const ProductionSystem& system, const Workload& workload, const LossSpec& spec,
                  const PenaltySpec& penalties) {
  LossEvaluator ev(system.network, system.resource, workload, spec, penalties);
  return ev.value(system.agents);
}

std::vector<double> gradient(const ProductionSystem& system, const Workload& workload,
                             const LossSpec& spec, const PenaltySpec& penalties) {
  LossEvaluator ev(system.network, system.resource, workload, spec, penalties);
  std::vector<double> grad;
  ev.value_and_gradient(system.agents, grad);
  return grad;
}

std::vector<double> gradient_fd(const ProductionSystem& system, const Workload& workload,
                                const LossSpec& spec, const PenaltySpec& penalties, double step) {
  LossEvaluator ev(system.network, system.resource, workload, spec, penalties);
  const int n = system.size();
  std::vector<double> grad(static_cast<std::size_t>(2 * n));
  std::vector<AgentParams> agents = system.agents;
  for (int i = 0; i < n; ++i) {
    const Angle mu = agents[static_cast<std::size_t>(i)].mu;
    agents[static_cast<std::size_t>(i)].mu = Angle(mu.value() + step);
    const double up = ev.value(agents);
    agents[static_cast<std::size_t>(i)].mu = Angle(mu.value() - step);
    const double dn = ev.value(agents);
    agents[static_cast<std::size_t>(i)].mu = mu;
    grad[static_cast<std::size_t>(i)] = (up - dn) / (2.0 * step);

    const double sigma = agents[static_cast<std::size_t>(i)].sigma;
    agents[static_cast<std::size_t>(i)].sigma = sigma + step;
    const double up_s = ev.value(agents);
    agents[static_cast<std::size_t>(i)].sigma = sigma - step;
    const double dn_s = ev.value(agents);
    agents[static_cast<std::size_t>(i)].sigma = sigma;
    grad[static_cast<std::size_t>(n + i)] = (up_s - dn_s) / (2.0 * step);
  }
  return grad;
}

double mismatch_from_values(std::span<const double> w0,
                            const std::vector<std::vector<double>>& component_production,
                            double spacing, double p) {
  double loss = 0.0;
  for (const auto& wc : component_production) {
    if (wc.size() != w0.size())
      throw std::invalid_argument("mismatch_from_values: size mismatch");
    double f = 0.0;
    for (std::size_t t = 0; t < wc.size(); ++t) {
      const double g = (w0[t] - wc[t]) / wc[t];
      if (g > 0.0) f += std::pow(g, p);
    }
    f *= spacing;
    if (f > 0.0) loss += std::pow(f, 1.0 / p);
  }
  return loss;
}

OptimizationResult optimize(const ProductionSystem& system, const Workload& workload,
                            const LossSpec& spec, const PenaltySpec& penalties,
                            const OptimizerConfig& config) {
  if (config.patience > config.max_steps)
    throw std::invalid_argument("OptimizerConfig: patience must be <= max_steps");
  LossEvaluator ev(system.network, system.resource, workload, spec, penalties);
  const int n = system.size();
  std::vector<AgentParams> agents = system.agents;

  OptimizationResult result;
  result.final_agents = agents;
  double best = std::numeric_limits<double>::infinity();
  int since_improvement = 0;
  std::vector<double> grad;

  for (int step = 0;; ++step) {
    double loss;
    if (config.analytic_gradient) {
      loss = ev.value_and_gradient(agents, grad);
    } else {
      loss = ev.value(agents);
      grad = gradient_fd(ProductionSystem(agents, system.network, system.resource), workload, spec,
                         penalties, config.fd_step);
    }
    if (!std::isfinite(loss))
      throw std::runtime_error("optimize: non-finite loss at step " + std::to_string(step));
    for (double g : grad)
      if (!std::isfinite(g))
        throw std::runtime_error("optimize: non-finite gradient at step " + std::to_string(step));

    result.loss_trace.push_back(loss);
    if (loss < best - config.abs_tol) {
      best = loss;
      result.final_agents = agents;
      since_improvement = 0;
    } else {
      if (loss < best) {  // keep the best point even for sub-tolerance gains
        best = loss;
        result.final_agents = agents;
      }
      ++since_improvement;
    }
    result.best_trace.push_back(best);

    if (best == 0.0 || since_improvement >= config.patience) {
      result.converged = true;
      break;
    }
    if (step >= config.max_steps) break;

    double scale = 1.0;
    if (config.max_gradient_norm > 0.0) {
      double norm = 0.0;
      for (double g : grad) norm += g * g;
      norm = std::sqrt(norm);
      if (norm > config.max_gradient_norm) scale = config.max_gradient_norm / norm;
    }
    const double step_size = config.learning_rate * scale;
    for (int i = 0; i < n; ++i) {
      auto& a = agents[static_cast<std::size_t>(i)];
      a.mu = Angle(a.mu.value() - step_size * grad[static_cast<std::size_t>(i)]);
      a.sigma = std::max(config.sigma_floor,
                         a.sigma - step_size * grad[static_cast<std::size_t>(n + i)]);
    }
  }

  result.final_loss = best;
  result.steps_taken = static_cast<int>(result.loss_trace.size()) - 1;
  return result;
}

Aggregate aggregate(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("aggregate: empty sample");
  Aggregate a;
  const int n = static_cast<int>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / n;
  if (n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.stddev = std::sqrt(ss / (n - 1));
  }
  a.standard_error = a.stddev / std::sqrt(static_cast<double>(n));
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double pos = q * (n - 1);
    const int lo = static_cast<int>(pos);
    const int hi = std::min(lo + 1, n - 1);
    const double frac = pos - lo;
    return values[static_cast<std::size_t>(lo)] * (1.0 - frac) +
           values[static_cast<std::size_t>(hi)] * frac;
  };
  a.median = quantile(0.5);
  a.q10 = quantile(0.10);
  a.q90 = quantile(0.90);
  return a;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  const int workers = std::min(threads, n);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

MonteCarloSummary monte_carlo(const RunSpec& spec, int n_seeds, int threads) {
  if (n_seeds < 1) throw std::invalid_argument("monte_carlo: n_seeds must be >= 1");
  MonteCarloSummary summary;
  summary.runs.resize(static_cast<std::size_t>(n_seeds));
  parallel_for(n_seeds, threads, [&](int s) {
    Rng rng = derive_rng(spec.config.seed + static_cast<std::uint64_t>(s), 0);
    std::vector<AgentParams> init;
    init.reserve(static_cast<std::size_t>(spec.network.size()));
    for (int i = 0; i < spec.network.size(); ++i) {
      const double mu = rng.uniform(spec.config.init_mu_lo, spec.config.init_mu_hi);
      const double sigma = rng.uniform(spec.config.init_sigma_lo, spec.config.init_sigma_hi);
      init.emplace_back(Angle(mu), sigma);
    }
    ProductionSystem system(init, spec.network, spec.resource);
    summary.runs[static_cast<std::size_t>(s)] =
        optimize(system, spec.workload, spec.loss, spec.penalties, spec.config);
  });

  std::vector<double> losses, het, sp, prod;
  for (const auto& r : summary.runs) {
    losses.push_back(r.final_loss);
    het.push_back(heterogeneity(r.final_agents));
    sp.push_back(specialisation_mean(r.final_agents));
    prod.push_back(productivity(r.final_loss));
  }
  summary.loss = aggregate(losses);
  summary.heterogeneity = aggregate(het);
  summary.specialisation = aggregate(sp);
  summary.productivity = aggregate(prod);
  return summary;
}

}  // namespace prodsys
