#pragma once

#include <limits>
#include <vector>

#include "prodsys/model.hpp"

namespace prodsys {

// Inverse breadth 1/sigma of a single agent.
double specialisation(const AgentParams& agent);

// Mean specialisation across the system's agents.
double specialisation_mean(const std::vector<AgentParams>& agents);

// Similarity kernel exp(-d(mu_i, mu_j) / sqrt(sigma_i^2 + sigma_j^2)), in (0, 1].
double similarity(const AgentParams& a, const AgentParams& b);

struct SimilarityMatrix {
  int size = 0;
  std::vector<double> z;  // row-major, unit diagonal

  double at(int i, int j) const { return z[static_cast<std::size_t>(i * size + j)]; }
};

SimilarityMatrix similarity_matrix(const std::vector<AgentParams>& agents);

// Similarity-sensitive heterogeneity of order 2 with uniform abundances,
// shifted so that identical agents score 0. Range [0, N-1).
double heterogeneity(const std::vector<AgentParams>& agents);

inline constexpr double kDiversityInfinity = std::numeric_limits<double>::infinity();

// General order-q diversity of a similarity matrix under an abundance
// distribution. q = 1 and q = infinity use their closed forms.
double diversity_q(const SimilarityMatrix& z, const std::vector<double>& abundance, double q);

struct ProductionMeasures {
  double production = 0.0;       // integral of pooled W1
  double overproduction = 0.0;   // integral of max(0, W1 - W0)
  double effective = 0.0;        // production - overproduction
};

ProductionMeasures production_measures(const ProductionSystem& system, const Workload& workload,
                                       const Grid& grid);

// Productivity index 1 / (1 + loss), in (0, 1].
double productivity(double loss_value);

struct EfficacyEfficiency {
  double efficacy = 0.0;    // effective / production, in [0, 1]
  double efficiency = 0.0;  // effective / N
};

EfficacyEfficiency efficacy_efficiency(double production, double effective, int n_agents);

struct MetricsReport {
  double specialisation_mean = 0.0;
  double heterogeneity = 0.0;
  double production = 0.0;
  double overproduction = 0.0;
  double effective_production = 0.0;
  double productivity = 0.0;
  double efficacy = 0.0;
  double efficiency = 0.0;
};

MetricsReport metrics_report(const ProductionSystem& system, const Workload& workload,
                             const Grid& grid, double loss_value);

}  // namespace prodsys
