#include "prodsys/model.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace prodsys {

Network::Network(int size, bool include_identity)
    : size_(size), include_identity_(include_identity) {
  if (size <= 0) throw std::invalid_argument("Network: size must be positive");
  q_.assign(static_cast<std::size_t>(size) * size, 0.0);
}

void Network::set_edge(int i, int j, double weight) {
  if (i == j) throw std::invalid_argument("Network: diagonal must stay zero");
  if (weight < 0.0) throw std::invalid_argument("Network: weights must be non-negative");
  q_[static_cast<std::size_t>(i * size_ + j)] = weight;
  q_[static_cast<std::size_t>(j * size_ + i)] = weight;
}

Network Network::none(int size) { return Network(size, true); }

Network Network::complete(int size) {
  Network n(size, true);
  for (int i = 0; i < size; ++i)
    for (int j = i + 1; j < size; ++j) n.set_edge(i, j, 1.0);
  return n;
}

Network Network::ring(int size) {
  // Cycle adjacency A + A^T. The 2-cycle collapses onto one edge of weight
  // 2, so every ring gives column sums of 2; a 1-cycle has no edges at all
  // and keeps the identity so a singleton still produces.
  Network n(size, size == 1);
  if (size == 1) return n;
  if (size == 2) {
    n.set_edge(0, 1, 2.0);
    return n;
  }
  for (int i = 0; i < size; ++i) n.set_edge(i, (i + 1) % size, 1.0);
  return n;
}

Network Network::star(int leaves) {
  Network n(leaves + 1, true);
  for (int i = 1; i <= leaves; ++i) n.set_edge(0, i, 1.0);
  return n;
}

Network Network::three_tier(int penumbra, int per) {
  const int size = 1 + penumbra + penumbra * per;
  Network n(size, true);
  for (int p = 0; p < penumbra; ++p) {
    const int pi = 1 + p;
    n.set_edge(0, pi, 1.0);
    for (int l = 0; l < per; ++l) n.set_edge(pi, 1 + penumbra + p * per + l, 1.0);
  }
  return n;
}

Network Network::blocks(int size, int block) {
  if (block <= 0 || size % block != 0)
    throw std::invalid_argument("Network::blocks: block must divide size");
  Network n(size, true);
  for (int b = 0; b < size / block; ++b)
    for (int i = 0; i < block; ++i)
      for (int j = i + 1; j < block; ++j) n.set_edge(b * block + i, b * block + j, 1.0);
  return n;
}

Network Network::two_cluster_bridge(int cluster, double bridge_weight) {
  Network n(2 * cluster, true);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < cluster; ++i)
      for (int j = i + 1; j < cluster; ++j) n.set_edge(c * cluster + i, c * cluster + j, 1.0);
  n.set_edge(cluster - 1, cluster, bridge_weight);
  return n;
}

Network Network::from_matrix(std::vector<std::vector<double>> q, bool include_identity) {
  const int size = static_cast<int>(q.size());
  Network n(size, include_identity);
  for (int i = 0; i < size; ++i) {
    if (static_cast<int>(q[static_cast<std::size_t>(i)].size()) != size)
      throw std::invalid_argument("Network::from_matrix: matrix must be square");
    if (q[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] != 0.0)
      throw std::invalid_argument("Network::from_matrix: diagonal must be zero");
    for (int j = i + 1; j < size; ++j) {
      const double w = q[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (w != q[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)])
        throw std::invalid_argument("Network::from_matrix: matrix must be symmetric");
      if (w != 0.0) n.set_edge(i, j, w);
    }
  }
  return n;
}

ComponentPartition connected_components(const Network& network) {
  const int n = network.size();
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  ComponentPartition partition;
  std::vector<int> stack;
  for (int start = 0; start < n; ++start) {
    if (label[static_cast<std::size_t>(start)] >= 0) continue;
    const int id = static_cast<int>(partition.components.size());
    partition.components.emplace_back();
    stack.push_back(start);
    label[static_cast<std::size_t>(start)] = id;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      partition.components.back().push_back(i);
      for (int j = 0; j < n; ++j) {
        if (network.q(i, j) > 0.0 && label[static_cast<std::size_t>(j)] < 0) {
          label[static_cast<std::size_t>(j)] = id;
          stack.push_back(j);
        }
      }
    }
  }
  return partition;
}

AgentWeights agent_weights(const Network& network) {
  const int n = network.size();
  AgentWeights w;
  w.alpha.assign(static_cast<std::size_t>(n), network.include_identity() ? 1.0 : 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w.alpha[static_cast<std::size_t>(i)] += network.q(j, i);
  double sum = 0.0;
  for (double a : w.alpha) sum += a;
  w.mean = sum / n;
  w.deviation.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    w.deviation[static_cast<std::size_t>(i)] = w.mean - w.alpha[static_cast<std::size_t>(i)];
  return w;
}

Workload Workload::uniform(double level, std::string name) {
  Workload w;
  w.kind = Kind::uniform;
  w.uniform_level = level;
  w.name = std::move(name);
  return w;
}

Workload Workload::mixture(std::vector<WorkloadComponent> components, double uniform_level,
                           std::string name) {
  for (const auto& c : components) {
    if (c.spread < kSigmaFloor)
      throw std::invalid_argument("Workload: mixture spreads must be >= " + std::to_string(kSigmaFloor));
    if (c.weight <= 0.0) throw std::invalid_argument("Workload: mixture weights must be positive");
  }
  Workload w;
  w.kind = Kind::mixture;
  w.components = std::move(components);
  w.uniform_level = uniform_level;
  w.name = std::move(name);
  return w;
}

Workload Workload::tabulated(std::vector<double> values, std::string name) {
  if (values.empty()) throw std::invalid_argument("Workload: empty table");
  for (double v : values)
    if (v < 0.0) throw std::invalid_argument("Workload: tabulated values must be non-negative");
  Workload w;
  w.kind = Kind::tabulated;
  w.table = std::move(values);
  w.name = std::move(name);
  return w;
}

double Workload::eval(double theta) const {
  switch (kind) {
    case Kind::uniform:
      return uniform_level;
    case Kind::mixture: {
      double v = uniform_level;
      for (const auto& c : components)
        v += c.weight * wg_pdf(WrappedGaussian(Angle(c.center), c.spread), theta);
      return v;
    }
    case Kind::tabulated: {
      // Piecewise-linear interpolation between the table's own grid nodes.
      const int L = static_cast<int>(table.size());
      const double pos = wrap_angle(theta) / (kTwoPi / L);
      const int i0 = static_cast<int>(pos) % L;
      const int i1 = (i0 + 1) % L;
      const double frac = pos - static_cast<int>(pos);
      return table[static_cast<std::size_t>(i0)] * (1.0 - frac) +
             table[static_cast<std::size_t>(i1)] * frac;
    }
  }
  return 0.0;
}

Workload Workload::rotated(double offset) const {
  Workload w = *this;
  if (kind == Kind::mixture) {
    for (auto& c : w.components) c.center = wrap_angle(c.center + offset);
  } else if (kind == Kind::tabulated) {
    const int L = static_cast<int>(table.size());
    for (int i = 0; i < L; ++i)
      w.table[static_cast<std::size_t>(i)] = eval(i * kTwoPi / L - offset);
  }
  return w;
}

std::vector<double> workload_eval(const Workload& w, const Grid& grid) {
  const int L = grid.size();
  if (w.kind == Workload::Kind::tabulated && static_cast<int>(w.table.size()) != L)
    throw std::invalid_argument("workload_eval: tabulated size does not match grid");
  std::vector<double> out(static_cast<std::size_t>(L));
  if (w.kind == Workload::Kind::tabulated) {
    out = w.table;
    return out;
  }
  if (w.kind == Workload::Kind::uniform) {
    for (auto& v : out) v = w.uniform_level;
    return out;
  }
  for (auto& v : out) v = w.uniform_level;
  std::vector<double> buf(static_cast<std::size_t>(L));
  for (const auto& c : w.components) {
    wg_eval_grid(WrappedGaussian(Angle(c.center), c.spread), grid, buf);
    for (int i = 0; i < L; ++i) out[static_cast<std::size_t>(i)] += c.weight * buf[static_cast<std::size_t>(i)];
  }
  return out;
}

ProductionSystem::ProductionSystem(std::vector<AgentParams> agents_, Network network_,
                                   double resource_)
    : agents(std::move(agents_)), network(std::move(network_)), resource(resource_) {
  if (static_cast<int>(agents.size()) != network.size())
    throw std::invalid_argument("ProductionSystem: agent count must match network size");
  if (!(resource > 0.0)) throw std::invalid_argument("ProductionSystem: resource must be positive");
}

std::vector<double> individual_production(const AgentParams& agent, const Grid& grid) {
  std::vector<double> out(static_cast<std::size_t>(grid.size()));
  wg_eval_grid(WrappedGaussian(agent.mu, agent.sigma), grid, out);
  return out;
}

JointProduction joint_production(const ProductionSystem& system, const Grid& grid) {
  const int L = grid.size();
  JointProduction jp;
  jp.partition = connected_components(system.network);
  const AgentWeights weights = agent_weights(system.network);
  jp.pooled.assign(static_cast<std::size_t>(L), 0.0);
  std::vector<double> buf(static_cast<std::size_t>(L));
  for (const auto& comp : jp.partition.components) {
    std::vector<double> wc(static_cast<std::size_t>(L), 0.0);
    for (int i : comp) {
      const auto& a = system.agents[static_cast<std::size_t>(i)];
      wg_eval_grid(WrappedGaussian(a.mu, a.sigma), grid, buf);
      const double scale = weights.alpha[static_cast<std::size_t>(i)] / system.resource;
      for (int n = 0; n < L; ++n) wc[static_cast<std::size_t>(n)] += scale * buf[static_cast<std::size_t>(n)];
    }
    for (int n = 0; n < L; ++n) jp.pooled[static_cast<std::size_t>(n)] += wc[static_cast<std::size_t>(n)];
    jp.per_component.push_back(std::move(wc));
  }
  return jp;
}

}  // namespace prodsys
