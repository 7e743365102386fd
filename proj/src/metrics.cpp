#include "prodsys/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace prodsys {

double specialisation(const AgentParams& agent) {
  if (!(agent.sigma > 0.0)) throw std::invalid_argument("specialisation: sigma must be positive");
  return 1.0 / agent.sigma;
}

double specialisation_mean(const std::vector<AgentParams>& agents) {
  if (agents.empty()) throw std::invalid_argument("specialisation_mean: no agents");
  double sum = 0.0;
  for (const auto& a : agents) sum += specialisation(a);
  return sum / static_cast<double>(agents.size());
}

double similarity(const AgentParams& a, const AgentParams& b) {
  const double d = circ_dist(a.mu, b.mu);
  return std::exp(-d / std::sqrt(a.sigma * a.sigma + b.sigma * b.sigma));
}

SimilarityMatrix similarity_matrix(const std::vector<AgentParams>& agents) {
  const int n = static_cast<int>(agents.size());
  SimilarityMatrix m;
  m.size = n;
  m.z.assign(static_cast<std::size_t>(n) * n, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double s = similarity(agents[static_cast<std::size_t>(i)], agents[static_cast<std::size_t>(j)]);
      m.z[static_cast<std::size_t>(i * n + j)] = s;
      m.z[static_cast<std::size_t>(j * n + i)] = s;
    }
  return m;
}

double heterogeneity(const std::vector<AgentParams>& agents) {
  const int n = static_cast<int>(agents.size());
  if (n < 1) throw std::invalid_argument("heterogeneity: no agents");
  if (n == 1) return 0.0;
  double pair_sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      pair_sum += similarity(agents[static_cast<std::size_t>(i)], agents[static_cast<std::size_t>(j)]);
  return n / (1.0 + (2.0 / n) * pair_sum) - 1.0;
}

double diversity_q(const SimilarityMatrix& z, const std::vector<double>& abundance, double q) {
  const int n = z.size;
  if (static_cast<int>(abundance.size()) != n)
    throw std::invalid_argument("diversity_q: abundance size does not match matrix");
  if (q < 0.0) throw std::invalid_argument("diversity_q: q must be >= 0");
  double total = 0.0;
  for (double p : abundance) {
    if (p < 0.0) throw std::invalid_argument("diversity_q: abundances must be >= 0");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::invalid_argument("diversity_q: abundances must sum to 1");

  std::vector<double> zp(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += z.at(i, j) * abundance[static_cast<std::size_t>(j)];
    zp[static_cast<std::size_t>(i)] = s;
  }

  // Elements with zero abundance do not contribute (expandability).
  if (std::isinf(q)) {
    double m = 0.0;
    for (int i = 0; i < n; ++i)
      if (abundance[static_cast<std::size_t>(i)] > 0.0) m = std::max(m, zp[static_cast<std::size_t>(i)]);
    return 1.0 / m;
  }
  if (q == 1.0) {
    double log_prod = 0.0;
    for (int i = 0; i < n; ++i) {
      const double p = abundance[static_cast<std::size_t>(i)];
      if (p > 0.0) log_prod -= p * std::log(zp[static_cast<std::size_t>(i)]);
    }
    return std::exp(log_prod);
  }
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double p = abundance[static_cast<std::size_t>(i)];
    if (p > 0.0) s += p * std::pow(zp[static_cast<std::size_t>(i)], q - 1.0);
  }
  return std::pow(s, 1.0 / (1.0 - q));
}

ProductionMeasures production_measures(const ProductionSystem& system, const Workload& workload,
                                       const Grid& grid) {
  const JointProduction jp = joint_production(system, grid);
  const std::vector<double> w0 = workload_eval(workload, grid);
  ProductionMeasures m;
  double over = 0.0, prod = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const double w1 = jp.pooled[static_cast<std::size_t>(i)];
    prod += w1;
    over += std::max(0.0, w1 - w0[static_cast<std::size_t>(i)]);
  }
  m.production = prod * grid.spacing();
  m.overproduction = over * grid.spacing();
  m.effective = m.production - m.overproduction;
  return m;
}

double productivity(double loss_value) {
  if (loss_value < 0.0) throw std::invalid_argument("productivity: loss must be >= 0");
  return 1.0 / (1.0 + loss_value);
}

EfficacyEfficiency efficacy_efficiency(double production, double effective, int n_agents) {
  if (!(production > 0.0)) throw std::invalid_argument("efficacy_efficiency: production must be > 0");
  if (n_agents < 1) throw std::invalid_argument("efficacy_efficiency: need at least one agent");
  EfficacyEfficiency e;
  e.efficacy = effective / production;
  e.efficiency = effective / n_agents;
  return e;
}

MetricsReport metrics_report(const ProductionSystem& system, const Workload& workload,
                             const Grid& grid, double loss_value) {
  MetricsReport r;
  r.specialisation_mean = specialisation_mean(system.agents);
  r.heterogeneity = heterogeneity(system.agents);
  const ProductionMeasures pm = production_measures(system, workload, grid);
  r.production = pm.production;
  r.overproduction = pm.overproduction;
  r.effective_production = pm.effective;
  r.productivity = productivity(loss_value);
  const EfficacyEfficiency ee = efficacy_efficiency(pm.production, pm.effective, system.size());
  r.efficacy = ee.efficacy;
  r.efficiency = ee.efficiency;
  return r;
}

}  // namespace prodsys
