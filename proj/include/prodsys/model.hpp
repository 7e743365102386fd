#pragma once

#include <string>
#include <vector>

#include "prodsys/geometry.hpp"

namespace prodsys {

struct AgentParams {
  Angle mu;
  double sigma = 1.0;

  AgentParams() = default;
  AgentParams(Angle mu_, double sigma_) : mu(mu_), sigma(sigma_) {}
  AgentParams(double mu_, double sigma_) : mu(mu_), sigma(sigma_) {}
};

// Symmetric non-negative interaction matrix with zero diagonal. When
// include_identity is set, production weights come from I + Q; the ring
// constructor follows the convention that drops the identity contribution.
class Network {
 public:
  Network(int size, bool include_identity);

  static Network none(int size);                     // Q = 0, identity kept
  static Network complete(int size);                 // all-ones off-diagonal
  static Network ring(int size);                     // cycle adjacency, no identity
  static Network star(int leaves);                   // node 0 hub + `leaves` spokes
  static Network three_tier(int penumbra, int per);  // core / penumbra / periphery
  static Network blocks(int size, int block);        // disjoint fully connected blocks
  static Network two_cluster_bridge(int cluster, double bridge_weight);
  static Network from_matrix(std::vector<std::vector<double>> q, bool include_identity);

  int size() const { return size_; }
  bool include_identity() const { return include_identity_; }
  double q(int i, int j) const { return q_[static_cast<std::size_t>(i * size_ + j)]; }
  void set_edge(int i, int j, double weight);

 private:
  int size_;
  bool include_identity_;
  std::vector<double> q_;
};

struct ComponentPartition {
  std::vector<std::vector<int>> components;
};

// Connected components over edges with q > 0.
ComponentPartition connected_components(const Network& network);

struct AgentWeights {
  std::vector<double> alpha;      // column sums of (I + Q) or Q
  double mean = 0.0;              // mean-field weight
  std::vector<double> deviation;  // delta_i = mean - alpha_i
};

AgentWeights agent_weights(const Network& network);

struct WorkloadComponent {
  double center = 0.0;
  double spread = 1.0;
  double weight = 1.0;
};

struct Workload {
  enum class Kind { mixture, uniform, tabulated };

  Kind kind = Kind::uniform;
  std::vector<WorkloadComponent> components;
  double uniform_level = 0.0;
  std::vector<double> table;  // tabulated values on a uniform grid of table.size() nodes
  std::string name;

  static Workload uniform(double level, std::string name = "uniform");
  static Workload mixture(std::vector<WorkloadComponent> components, double uniform_level = 0.0,
                          std::string name = "");
  static Workload tabulated(std::vector<double> values, std::string name = "");

  double eval(double theta) const;
  // Workload with every mixture centre shifted by `offset` radians.
  Workload rotated(double offset) const;
};

// Demand density at every grid node; tabulated workloads must match the
// grid size exactly.
std::vector<double> workload_eval(const Workload& w, const Grid& grid);

struct ProductionSystem {
  std::vector<AgentParams> agents;
  Network network;
  double resource = 1.0;

  ProductionSystem(std::vector<AgentParams> agents_, Network network_, double resource_);
  int size() const { return static_cast<int>(agents.size()); }
};

std::vector<double> individual_production(const AgentParams& agent, const Grid& grid);

struct JointProduction {
  std::vector<std::vector<double>> per_component;  // aligned with partition order
  std::vector<double> pooled;                      // sum over components
  ComponentPartition partition;
};

// Per-component production W_c = sum_{i in c} alpha_i w_i / R and the
// pooled sum used by the production metrics.
JointProduction joint_production(const ProductionSystem& system, const Grid& grid);

}  // namespace prodsys
