#include "prodsys/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

namespace prodsys {
namespace {

using nlohmann::json;

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
}

std::uint64_t cell_seed(std::uint64_t base, std::uint64_t cell) {
  Rng r = derive_rng(base, cell);
  return r.next();
}

std::vector<AgentParams> random_init(int n, Rng& rng, const OptimizerConfig& oc) {
  std::vector<AgentParams> agents;
  agents.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    agents.emplace_back(Angle(rng.uniform(oc.init_mu_lo, oc.init_mu_hi)),
                        rng.uniform(oc.init_sigma_lo, oc.init_sigma_hi));
  return agents;
}

Workload bimodal_task(double weight_per_peak = 0.5) {
  return Workload::mixture(
      {{kPi / 2, 0.5, weight_per_peak}, {3 * kPi / 2, 0.5, weight_per_peak}}, 0.0, "bimodal");
}

// Mixture used by the star and three-tier runs.
Workload hub_task() {
  return Workload::mixture({{kPi / 4, 0.4, 0.25},
                            {3 * kPi / 4, 0.4, 0.25},
                            {5 * kPi / 4, 0.4, 0.25},
                            {7 * kPi / 4, 0.4, 0.25}},
                           0.0, "quad_even");
}

// Seven modes at k*pi/4, k = 1..7, used by the communication-cost sweep.
Workload seven_mode_task() {
  std::vector<WorkloadComponent> comps;
  for (int k = 1; k <= 7; ++k) comps.push_back({k * kPi / 4, 0.3, 1.0 / 7});
  return Workload::mixture(std::move(comps), 0.0, "seven_modes");
}

// Five peaks with unequal heights, used by the learning and hardware runs.
Workload five_mix_task() {
  const double weights[5] = {0.30, 0.15, 0.25, 0.10, 0.20};
  std::vector<WorkloadComponent> comps;
  for (int j = 0; j < 5; ++j) comps.push_back({(2 * j + 1) * kPi / 5, 0.3, weights[j]});
  return Workload::mixture(std::move(comps), 0.0, "five_mix");
}

std::vector<double> lambda_grid(double lo, double hi, int count, bool with_zero) {
  std::vector<double> out;
  if (with_zero) out.push_back(0.0);
  const int n = with_zero ? count - 1 : count;
  for (int i = 0; i < n; ++i)
    out.push_back(lo * std::pow(hi / lo, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1)));
  return out;
}

ProductionSystem fixed_pair(double mu1, double mu2, double resource) {
  return ProductionSystem({AgentParams(Angle(mu1), 0.5), AgentParams(Angle(mu2), 0.5)},
                          Network::ring(2), resource);
}

double realised_consumption(const ProductionSystem& system, const Workload& workload,
                            int grid_size) {
  const Grid grid(grid_size);
  const JointProduction jp = joint_production(system, grid);
  const std::vector<double> w0 = workload_eval(workload, grid);
  double acc = 0.0;
  for (int i = 0; i < grid.size(); ++i)
    acc += std::min(w0[static_cast<std::size_t>(i)], jp.pooled[static_cast<std::size_t>(i)]);
  return acc * grid.spacing();
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void ResultTable::write_csv(std::ostream& out) const {
  bool first = true;
  for (const auto& c : label_columns) {
    if (!first) out << ",";
    out << c;
    first = false;
  }
  for (const auto& c : value_columns) {
    if (!first) out << ",";
    out << c;
    first = false;
  }
  out << "\n";
  for (const auto& row : rows) {
    first = true;
    for (const auto& l : row.labels) {
      if (!first) out << ",";
      out << l;
      first = false;
    }
    for (double v : row.values) {
      if (!first) out << ",";
      out << format_double(v);
      first = false;
    }
    out << "\n";
  }
}

void ResultTable::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_csv(out);
}

double ExperimentConfig::resolve_resource(int n_agents) const {
  if (!resource_rule.empty()) {
    if (resource_rule == "2N") return 2.0 * n_agents;
    if (resource_rule == "2+logN") return 2.0 + std::log(static_cast<double>(n_agents));
    throw std::invalid_argument("unknown resource rule: " + resource_rule);
  }
  if (resource > 0.0) return resource;
  throw std::invalid_argument("no resource specified");
}

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "scaling") {
    c.catalogue = "pics8";
    c.agent_counts = {2, 4, 8, 16, 32};
    c.resource_rule = "2N";
    c.seeds = 8;
  } else if (experiment == "topology") {
    c.topology = "star";
    c.seeds = 50;
    c.block_sizes = {1, 2, 4, 8};
  } else if (experiment == "commcost") {
    c.resource = 16.0;
    c.seeds = 20;
    c.lambda_values = lambda_grid(1e-4, 0.16, 21, true);
  } else if (experiment == "efficiency") {
    c.resource_values = {2, 4, 8, 16, 32, 64};
    c.lambda_values = {0.0, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0};
    c.seeds = 5;
  } else if (experiment == "robustness") {
    c.catalogue = "unimodal16";
    c.resource = 4.0;
    c.seeds = 1;
  } else if (experiment == "economics") {
    c.resource = 4.0;
    c.seeds = 10;
    c.tasks = 20;
    c.lambda_values = {0.0, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0};
  } else if (experiment == "hardware") {
    c.seeds = 10;
    c.lambda_s = 10.0;
    c.agent_counts.resize(24);
    std::iota(c.agent_counts.begin(), c.agent_counts.end(), 2);
  } else if (experiment == "learning") {
    c.seeds = 4;
    c.lambda_values = {0.0, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0};
    c.agent_counts = {1, 2, 3, 4, 6, 8, 12, 16};
  } else if (experiment == "features") {
    c.catalogue = "pics8";
    c.agent_counts = {2, 4, 8, 16, 32};
    c.resource_rule = "2N";
    c.seeds = 8;
  } else if (experiment == "ecology") {
    c.agent_counts = {2, 3, 4, 6, 8, 12, 16, 24, 32};
    c.resource_rule = "2N";
    c.seeds = 6;
  } else if (experiment == "optimize") {
    c.resource = 4.0;
    c.seeds = 1;
  } else {
    throw std::invalid_argument("unknown experiment: " + experiment);
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["catalogue"] = c.catalogue;
  j["agent_counts"] = c.agent_counts;
  j["topology"] = c.topology;
  j["block_sizes"] = c.block_sizes;
  j["resource_rule"] = c.resource_rule;
  j["resource"] = c.resource;
  j["resource_values"] = c.resource_values;
  j["lambda_values"] = c.lambda_values;
  j["lambda_c"] = c.lambda_c;
  j["lambda_s"] = c.lambda_s;
  j["seeds"] = c.seeds;
  j["tasks"] = c.tasks;
  j["threads"] = c.threads;
  j["full"] = c.full;
  j["variant"] = c.variant;
  j["grid_size"] = c.grid_size;
  j["p"] = c.p;
  j["base_seed"] = c.base_seed;
  j["out_dir"] = c.out_dir;
  j["optimizer"] = {{"learning_rate", c.optimizer.learning_rate},
                    {"max_steps", c.optimizer.max_steps},
                    {"patience", c.optimizer.patience},
                    {"abs_tol", c.optimizer.abs_tol},
                    {"sigma_floor", c.optimizer.sigma_floor},
                    {"init_sigma_lo", c.optimizer.init_sigma_lo},
                    {"init_sigma_hi", c.optimizer.init_sigma_hi},
                    {"analytic_gradient", c.optimizer.analytic_gradient}};
  return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig c = default_config(j.at("experiment").get<std::string>());
  if (j.contains("catalogue")) c.catalogue = j["catalogue"].get<std::string>();
  if (j.contains("agent_counts")) c.agent_counts = j["agent_counts"].get<std::vector<int>>();
  if (j.contains("topology")) c.topology = j["topology"].get<std::string>();
  if (j.contains("block_sizes")) c.block_sizes = j["block_sizes"].get<std::vector<int>>();
  if (j.contains("resource_rule")) c.resource_rule = j["resource_rule"].get<std::string>();
  if (j.contains("resource")) c.resource = j["resource"].get<double>();
  if (j.contains("resource_values"))
    c.resource_values = j["resource_values"].get<std::vector<double>>();
  if (j.contains("lambda_values")) c.lambda_values = j["lambda_values"].get<std::vector<double>>();
  if (j.contains("lambda_c")) c.lambda_c = j["lambda_c"].get<double>();
  if (j.contains("lambda_s")) c.lambda_s = j["lambda_s"].get<double>();
  if (j.contains("seeds")) c.seeds = j["seeds"].get<int>();
  if (j.contains("tasks")) c.tasks = j["tasks"].get<int>();
  if (j.contains("threads")) c.threads = j["threads"].get<int>();
  if (j.contains("full")) c.full = j["full"].get<bool>();
  if (j.contains("variant")) c.variant = j["variant"].get<std::string>();
  if (j.contains("grid_size")) c.grid_size = j["grid_size"].get<int>();
  if (j.contains("p")) c.p = j["p"].get<double>();
  if (j.contains("base_seed")) c.base_seed = j["base_seed"].get<std::uint64_t>();
  if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("optimizer")) {
    const auto& o = j["optimizer"];
    if (o.contains("learning_rate")) c.optimizer.learning_rate = o["learning_rate"].get<double>();
    if (o.contains("max_steps")) c.optimizer.max_steps = o["max_steps"].get<int>();
    if (o.contains("patience")) c.optimizer.patience = o["patience"].get<int>();
    if (o.contains("abs_tol")) c.optimizer.abs_tol = o["abs_tol"].get<double>();
    if (o.contains("sigma_floor")) c.optimizer.sigma_floor = o["sigma_floor"].get<double>();
    if (o.contains("init_sigma_lo")) c.optimizer.init_sigma_lo = o["init_sigma_lo"].get<double>();
    if (o.contains("init_sigma_hi")) c.optimizer.init_sigma_hi = o["init_sigma_hi"].get<double>();
    if (o.contains("analytic_gradient"))
      c.optimizer.analytic_gradient = o["analytic_gradient"].get<bool>();
  }
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::vector<Workload> resolve_catalogue(const std::string& name_or_path) {
  for (const auto& n : catalogue_names())
    if (n == name_or_path) return catalogue_by_name(name_or_path);
  return load_catalogue_file(name_or_path);
}

// ---- scaling ----------------------------------------------------------------

ScalingResults run_scaling(const ExperimentConfig& config) {
  const std::vector<Workload> workloads = resolve_catalogue(config.catalogue);
  ScalingResults results;
  results.rows.label_columns = {"experiment", "workload"};
  results.rows.value_columns = {"n_agents", "seed", "loss", "heterogeneity", "specialisation",
                                "productivity"};
  results.fits.label_columns = {"workload"};
  results.fits.value_columns = {"H_inf", "a", "gamma", "r_squared", "converged"};

  std::uint64_t cell = 0;
  for (const auto& wl : workloads) {
    ScalingCurve curve;
    curve.workload = wl.name;
    for (int n : config.agent_counts) {
      RunSpec rs;
      rs.network = Network::ring(n);
      rs.resource = config.resolve_resource(n);
      rs.workload = wl;
      rs.loss = {config.p, config.grid_size};
      rs.config = config.optimizer;
      rs.config.seed = cell_seed(config.base_seed, cell++);
      const MonteCarloSummary mc = monte_carlo(rs, config.seeds, config.threads);
      curve.agent_counts.push_back(n);
      curve.median_h.push_back(mc.heterogeneity.median);
      curve.median_spec.push_back(mc.specialisation.median);
      for (int s = 0; s < config.seeds; ++s) {
        const auto& run = mc.runs[static_cast<std::size_t>(s)];
        results.rows.rows.push_back(
            {{"scaling", wl.name},
             {static_cast<double>(n), static_cast<double>(s), run.final_loss,
              heterogeneity(run.final_agents), specialisation_mean(run.final_agents),
              productivity(run.final_loss)}});
      }
    }
    std::vector<double> ns(curve.agent_counts.begin(), curve.agent_counts.end());
    curve.fit = fit_log_logistic(ns, curve.median_h);
    results.fits.rows.push_back({{wl.name},
                                 {curve.fit.param("H_inf"), curve.fit.param("a"),
                                  curve.fit.param("gamma"), curve.fit.r_squared,
                                  curve.fit.converged ? 1.0 : 0.0}});
    results.curves.push_back(std::move(curve));
  }
  return results;
}

// ---- topology ---------------------------------------------------------------

namespace {

TopologyResults run_topology_tiers(const ExperimentConfig& config, bool three_tier) {
  const Network network = three_tier ? Network::three_tier(8, 3) : Network::star(8);
  const int n = network.size();
  const double resource = config.resource > 0.0 ? config.resource : 100.0;
  const Workload task = hub_task();

  std::vector<std::string> tier_of(static_cast<std::size_t>(n), "peripheral");
  tier_of[0] = "core";
  if (three_tier)
    for (int i = 1; i <= 8; ++i) tier_of[static_cast<std::size_t>(i)] = "penumbra";

  TopologyResults results;
  results.rows.label_columns = {"experiment", "topology", "tier"};
  results.rows.value_columns = {"seed", "agent", "specialisation", "sigma", "mu"};

  std::vector<std::string> tier_names = {"core", "peripheral"};
  if (three_tier) tier_names = {"core", "penumbra", "peripheral"};
  std::vector<std::vector<double>> tier_means(tier_names.size());

  std::vector<std::vector<AgentParams>> finals(static_cast<std::size_t>(config.seeds));
  parallel_for(config.seeds, config.threads, [&](int s) {
    Rng rng = derive_rng(config.base_seed + static_cast<std::uint64_t>(s), three_tier ? 31 : 17);
    ProductionSystem system(random_init(n, rng, config.optimizer), network, resource);
    const OptimizationResult r =
        optimize(system, task, {config.p, config.grid_size}, {}, config.optimizer);
    finals[static_cast<std::size_t>(s)] = r.final_agents;
  });

  for (int s = 0; s < config.seeds; ++s) {
    const auto& agents = finals[static_cast<std::size_t>(s)];
    for (std::size_t t = 0; t < tier_names.size(); ++t) {
      double sum = 0.0;
      int count = 0;
      for (int i = 0; i < n; ++i) {
        if (tier_of[static_cast<std::size_t>(i)] != tier_names[t]) continue;
        const double sp = specialisation(agents[static_cast<std::size_t>(i)]);
        sum += sp;
        ++count;
        results.rows.rows.push_back({{"topology", three_tier ? "three_tier" : "star", tier_names[t]},
                                     {static_cast<double>(s), static_cast<double>(i), sp,
                                      agents[static_cast<std::size_t>(i)].sigma,
                                      agents[static_cast<std::size_t>(i)].mu.value()}});
      }
      tier_means[t].push_back(sum / count);
    }
  }
  for (std::size_t t = 0; t < tier_names.size(); ++t)
    results.tiers.push_back({tier_names[t], mean_of(tier_means[t]), se_of(tier_means[t])});
  return results;
}

TopologyResults run_topology_blocks(const ExperimentConfig& config) {
  const int n = 8;
  const double resource = config.resource > 0.0 ? config.resource : 8.0;
  // Unit weight per peak: at this demand mass the k = 4 components are
  // exactly capacity-matched and only full connectivity can cover the task.
  const Workload task = bimodal_task(1.0);

  TopologyResults results;
  results.rows.label_columns = {"experiment", "topology"};
  results.rows.value_columns = {"block_size", "seed", "loss", "h_sys", "h_within"};

  for (int k : config.block_sizes) {
    const Network network = Network::blocks(n, k);
    const ComponentPartition partition = connected_components(network);
    std::vector<double> losses(static_cast<std::size_t>(config.seeds));
    std::vector<double> h_sys(static_cast<std::size_t>(config.seeds));
    std::vector<double> h_within(static_cast<std::size_t>(config.seeds));
    parallel_for(config.seeds, config.threads, [&](int s) {
      Rng rng = derive_rng(config.base_seed + static_cast<std::uint64_t>(s),
                           static_cast<std::uint64_t>(100 + k));
      ProductionSystem system(random_init(n, rng, config.optimizer), network, resource);
      const OptimizationResult r =
          optimize(system, task, {config.p, config.grid_size}, {}, config.optimizer);
      losses[static_cast<std::size_t>(s)] = r.final_loss;
      h_sys[static_cast<std::size_t>(s)] = heterogeneity(r.final_agents);
      double hw = 0.0;
      for (const auto& comp : partition.components) {
        std::vector<AgentParams> sub;
        for (int i : comp) sub.push_back(r.final_agents[static_cast<std::size_t>(i)]);
        hw += heterogeneity(sub);
      }
      h_within[static_cast<std::size_t>(s)] = hw / static_cast<double>(partition.components.size());
    });
    for (int s = 0; s < config.seeds; ++s)
      results.rows.rows.push_back(
          {{"topology", "blocks"},
           {static_cast<double>(k), static_cast<double>(s), losses[static_cast<std::size_t>(s)],
            h_sys[static_cast<std::size_t>(s)], h_within[static_cast<std::size_t>(s)]}});
    results.blocks.push_back({k, median_of(losses), median_of(h_sys), median_of(h_within)});
  }
  return results;
}

}  // namespace

TopologyResults run_topology(const ExperimentConfig& config) {
  if (config.topology == "star") return run_topology_tiers(config, false);
  if (config.topology == "three_tier") return run_topology_tiers(config, true);
  if (config.topology == "blocks") return run_topology_blocks(config);
  throw std::invalid_argument("run_topology: topology must be star, three_tier, or blocks");
}

// ---- communication-cost sweep -------------------------------------------------

CommCostResults run_comm_cost_sweep(const ExperimentConfig& config) {
  const Network network = Network::two_cluster_bridge(3, 0.3);
  const int n = network.size();
  const double resource = config.resource > 0.0 ? config.resource : 16.0;
  const Workload task = seven_mode_task();

  CommCostResults results;
  results.rows.label_columns = {"experiment"};
  results.rows.value_columns = {"lambda_c", "seed", "d_within", "d_between", "loss"};

  for (std::size_t li = 0; li < config.lambda_values.size(); ++li) {
    const double lambda = config.lambda_values[li];
    PenaltySpec penalties;
    penalties.lambda_c = lambda;
    std::vector<double> within(static_cast<std::size_t>(config.seeds));
    std::vector<double> between(static_cast<std::size_t>(config.seeds));
    std::vector<double> losses(static_cast<std::size_t>(config.seeds));
    parallel_for(config.seeds, config.threads, [&](int s) {
      Rng rng = derive_rng(config.base_seed + static_cast<std::uint64_t>(s),
                           static_cast<std::uint64_t>(li + 1));
      ProductionSystem system(random_init(n, rng, config.optimizer), network, resource);
      const OptimizationResult r =
          optimize(system, task, {config.p, config.grid_size}, penalties, config.optimizer);
      const auto& a = r.final_agents;
      double dw = 0.0;
      for (int c = 0; c < 2; ++c) {
        double sum = 0.0;
        for (int i = 0; i < 3; ++i)
          for (int j = i + 1; j < 3; ++j)
            sum += circ_dist(a[static_cast<std::size_t>(3 * c + i)].mu,
                             a[static_cast<std::size_t>(3 * c + j)].mu);
        dw += sum / 3.0;
      }
      within[static_cast<std::size_t>(s)] = dw / 2.0;
      double db = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 3; j < 6; ++j)
          db += circ_dist(a[static_cast<std::size_t>(i)].mu, a[static_cast<std::size_t>(j)].mu);
      between[static_cast<std::size_t>(s)] = db / 9.0;
      losses[static_cast<std::size_t>(s)] = r.final_loss;
    });
    for (int s = 0; s < config.seeds; ++s)
      results.rows.rows.push_back(
          {{"commcost"},
           {lambda, static_cast<double>(s), within[static_cast<std::size_t>(s)],
            between[static_cast<std::size_t>(s)], losses[static_cast<std::size_t>(s)]}});
    results.lambdas.push_back(lambda);
    results.median_within.push_back(median_of(within));
    results.median_between.push_back(median_of(between));
  }
  return results;
}

// ---- efficiency ----------------------------------------------------------------

EfficiencyResults run_efficiency(const ExperimentConfig& config) {
  const int n = 16;
  const Network network = Network::ring(n);
  const Workload task = bimodal_task();

  EfficiencyResults results;
  results.rows.label_columns = {"experiment"};
  results.rows.value_columns = {"resource", "lambda_s", "seed", "heterogeneity", "task_perf",
                                "loss_m"};

  struct Cell {
    double resource, lambda;
    int seed;
  };
  std::vector<Cell> cells;
  for (double r : config.resource_values)
    for (double l : config.lambda_values)
      for (int s = 0; s < config.seeds; ++s) cells.push_back({r, l, s});

  std::vector<double> h(cells.size()), perf(cells.size()), loss_m(cells.size());
  parallel_for(static_cast<int>(cells.size()), config.threads, [&](int idx) {
    const Cell& cell = cells[static_cast<std::size_t>(idx)];
    Rng rng = derive_rng(config.base_seed, 0xEF0000ULL + static_cast<std::uint64_t>(idx));
    PenaltySpec p;
    p.lambda_s = cell.lambda;
    p.prior_mu.assign(static_cast<std::size_t>(n), Angle(kPi));
    ProductionSystem system(random_init(n, rng, config.optimizer), network, cell.resource);
    const OptimizationResult r =
        optimize(system, task, {config.p, config.grid_size}, p, config.optimizer);
    LossEvaluator ev(network, cell.resource, task, {config.p, config.grid_size}, p);
    const double lm = ev.mismatch_only(r.final_agents);
    h[static_cast<std::size_t>(idx)] = heterogeneity(r.final_agents);
    loss_m[static_cast<std::size_t>(idx)] = lm;
    perf[static_cast<std::size_t>(idx)] = 1.0 / (1.0 + lm);
  });

  for (std::size_t i = 0; i < cells.size(); ++i)
    results.rows.rows.push_back({{"efficiency"},
                                 {cells[i].resource, cells[i].lambda,
                                  static_cast<double>(cells[i].seed), h[i], perf[i], loss_m[i]}});

  results.pooled_r = pearson(h, perf).statistic;

  // Terciles over the sorted resource levels, abundant to scarce.
  std::vector<double> sorted_r = config.resource_values;
  std::sort(sorted_r.begin(), sorted_r.end());
  const std::size_t third = sorted_r.size() / 3;
  const std::vector<std::string> names = {"abundant", "mid", "scarce"};
  for (int t = 0; t < 3; ++t) {
    const std::size_t lo = t * third;
    const std::size_t hi = t == 2 ? sorted_r.size() : (t + 1) * third;
    std::vector<double> th, tp, tr;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      bool in_tercile = false;
      for (std::size_t k = lo; k < hi; ++k) in_tercile |= cells[i].resource == sorted_r[k];
      if (!in_tercile) continue;
      th.push_back(h[i]);
      tp.push_back(perf[i]);
      tr.push_back(cells[i].resource);
    }
    TercileStat stat;
    stat.regime = names[static_cast<std::size_t>(t)];
    stat.pearson_r = pearson(th, tp).statistic;
    const double sse_full = ols_sse({tr, th}, tp);
    const double sse_restricted = ols_sse({tr}, tp);
    const TestResult f = nested_f_test(sse_full, sse_restricted, 3, 2, static_cast<int>(tp.size()));
    stat.f_statistic = f.statistic;
    stat.p_value = f.p_value;
    // Deterministic 70/30 split: fit on train rows, compare test errors.
    std::vector<double> train_h, train_p, train_r, test_h, test_p, test_r;
    for (std::size_t i = 0; i < tp.size(); ++i) {
      if (i % 10 < 7) {
        train_h.push_back(th[i]);
        train_p.push_back(tp[i]);
        train_r.push_back(tr[i]);
      } else {
        test_h.push_back(th[i]);
        test_p.push_back(tp[i]);
        test_r.push_back(tr[i]);
      }
    }
    const std::vector<double> beta_full = ols_fit({train_r, train_h}, train_p);
    const std::vector<double> beta_restricted = ols_fit({train_r}, train_p);
    double e_full = 0.0, e_restricted = 0.0;
    for (std::size_t i = 0; i < test_p.size(); ++i) {
      const double pf = beta_full[0] + beta_full[1] * test_r[i] + beta_full[2] * test_h[i];
      const double pr = beta_restricted[0] + beta_restricted[1] * test_r[i];
      e_full += (test_p[i] - pf) * (test_p[i] - pf);
      e_restricted += (test_p[i] - pr) * (test_p[i] - pr);
    }
    stat.error_ratio = e_full > 0.0 ? e_restricted / e_full : 1.0;
    results.terciles.push_back(stat);
  }
  return results;
}

// ---- robustness -----------------------------------------------------------------

RobustnessResults run_robustness(const ExperimentConfig& config) {
  const double resource = config.resource > 0.0 ? config.resource : 4.0;
  const ProductionSystem homo = fixed_pair(kPi, kPi, resource);
  const ProductionSystem hetero = fixed_pair(kPi / 2, 3 * kPi / 2, resource);

  std::vector<std::string> catalogue_list;
  if (config.catalogue == "all" || config.catalogue.empty())
    catalogue_list = {"unimodal16", "diverse16", "homosuited16"};
  else
    catalogue_list = {config.catalogue};
  std::vector<std::string> regime_list = {"wave", "brownian", "extreme"};
  if (!config.variant.empty()) regime_list = {config.variant};

  RobustnessResults results;
  results.rows.label_columns = {"catalogue", "regime", "system"};
  results.rows.value_columns = {"task_id", "mean", "cv", "min"};
  results.tests.label_columns = {"catalogue", "regime", "metric", "test"};
  results.tests.value_columns = {"statistic", "p_value", "hetero_wins"};

  for (const auto& cat_name : catalogue_list) {
    const std::vector<Workload> tasks = resolve_catalogue(cat_name);
    for (const auto& regime_name : regime_list) {
      std::vector<double> means_h, means_o, cvs_h, cvs_o, mins_h, mins_o;
      for (std::size_t t = 0; t < tasks.size(); ++t) {
        EvolutionRegime regime;
        if (regime_name == "wave")
          regime = EvolutionRegime::wave();
        else if (regime_name == "brownian")
          regime = EvolutionRegime::brownian();
        else if (regime_name == "extreme")
          regime = EvolutionRegime::extreme();
        else
          throw std::invalid_argument("unknown regime: " + regime_name);
        SeriesConfig sc;
        sc.grid_size = config.grid_size;
        sc.p = config.p;
        sc.seed = cell_seed(config.base_seed, 7000 + t);  // same environment for both systems
        const RobustnessStats sh = robustness_stats(production_series(homo, regime, tasks[t], sc));
        const RobustnessStats se = robustness_stats(production_series(hetero, regime, tasks[t], sc));
        means_o.push_back(sh.mean);
        means_h.push_back(se.mean);
        cvs_o.push_back(sh.cv);
        cvs_h.push_back(se.cv);
        mins_o.push_back(sh.minimum);
        mins_h.push_back(se.minimum);
        results.cells.push_back({cat_name, regime_name, static_cast<int>(t), sh, se});
        results.rows.rows.push_back({{cat_name, regime_name, "homogeneous"},
                                     {static_cast<double>(t), sh.mean, sh.cv, sh.minimum}});
        results.rows.rows.push_back({{cat_name, regime_name, "heterogeneous"},
                                     {static_cast<double>(t), se.mean, se.cv, se.minimum}});
      }
      auto add_tests = [&](const std::string& metric, const std::vector<double>& hx,
                           const std::vector<double>& ox, bool lower_is_better) {
        int wins = 0;
        for (std::size_t i = 0; i < hx.size(); ++i)
          wins += lower_is_better ? (hx[i] < ox[i]) : (hx[i] > ox[i]);
        const TestResult t_test = paired_t(hx, ox);
        results.tests.rows.push_back({{cat_name, regime_name, metric, "paired_t"},
                                      {t_test.statistic, t_test.p_value, static_cast<double>(wins)}});
        try {
          const TestResult w = wilcoxon_signed_rank(hx, ox);
          results.tests.rows.push_back({{cat_name, regime_name, metric, "wilcoxon"},
                                        {w.statistic, w.p_value, static_cast<double>(wins)}});
        } catch (const std::invalid_argument&) {
          // too few nonzero differences; skip the nonparametric row
        }
      };
      add_tests("mean", means_h, means_o, false);
      add_tests("cv", cvs_h, cvs_o, true);
      add_tests("min", mins_h, mins_o, false);
    }
  }
  return results;
}

// ---- economics ------------------------------------------------------------------

EconomicsResults run_economics(const ExperimentConfig& config) {
  EconomicsResults results;
  results.rows.label_columns = {"experiment", "variant"};
  results.rows.value_columns = {"index", "x", "value_a", "value_b"};

  const bool run_all = config.variant.empty();
  const Workload bimodal = bimodal_task();
  const double resource = config.resource > 0.0 ? config.resource : 4.0;

  if (run_all || config.variant == "trade") {
    for (int s = 0; s < config.seeds; ++s) {
      Rng rng = derive_rng(config.base_seed + static_cast<std::uint64_t>(s), 211);
      const std::vector<AgentParams> init = random_init(2, rng, config.optimizer);
      const ProductionSystem trade_sys(init, Network::ring(2), resource);
      const ProductionSystem autarchy_sys(init, Network::none(2), resource);
      const OptimizationResult rt =
          optimize(trade_sys, bimodal, {config.p, config.grid_size}, {}, config.optimizer);
      const OptimizationResult ra =
          optimize(autarchy_sys, bimodal, {config.p, config.grid_size}, {}, config.optimizer);
      const double ct = realised_consumption(
          ProductionSystem(rt.final_agents, Network::ring(2), resource), bimodal, 2048);
      const double ca = realised_consumption(
          ProductionSystem(ra.final_agents, Network::none(2), resource), bimodal, 2048);
      results.trade.push_back({s, ct, ca});
      results.rows.rows.push_back({{"economics", "trade"}, {static_cast<double>(s), 0.0, ct, ca}});
    }
  }

  if (run_all || config.variant == "firm") {
    const int n = 6;
    const Network network = Network::ring(n);
    const double firm_resource = 12.0;  // twice the number of agents
    PenaltySpec base;
    base.prior_mu.assign(static_cast<std::size_t>(n), Angle(kPi));
    const int n_tasks = config.tasks;
    std::vector<double> rho_h(static_cast<std::size_t>(n_tasks));
    std::vector<double> rho_s(static_cast<std::size_t>(n_tasks));
    parallel_for(n_tasks, config.threads, [&](int t) {
      Rng rng = derive_rng(config.base_seed, 500 + static_cast<std::uint64_t>(t));
      const int modes = 1 + rng.uniform_int(4);
      std::vector<WorkloadComponent> comps;
      for (int m = 0; m < modes; ++m)
        comps.push_back({rng.uniform(0.0, kTwoPi), rng.uniform(0.2, 1.5), 1.0 / modes});
      const Workload task = Workload::mixture(comps, 0.0, "firm_task");
      const std::vector<AgentParams> init = random_init(n, rng, config.optimizer);
      std::vector<double> hs, sps, perfs;
      for (double lambda : config.lambda_values) {
        PenaltySpec p = base;
        p.lambda_s = lambda;
        ProductionSystem system(init, network, firm_resource);
        const OptimizationResult r =
            optimize(system, task, {config.p, config.grid_size}, p, config.optimizer);
        LossEvaluator ev(network, firm_resource, task, {config.p, config.grid_size}, p);
        const double lm = ev.mismatch_only(r.final_agents);
        hs.push_back(heterogeneity(r.final_agents));
        sps.push_back(specialisation_mean(r.final_agents));
        perfs.push_back(1.0 / (1.0 + lm));
      }
      rho_h[static_cast<std::size_t>(t)] = spearman(hs, perfs).statistic;
      rho_s[static_cast<std::size_t>(t)] = spearman(sps, perfs).statistic;
    });
    results.firm_spearman_h = rho_h;
    results.firm_spearman_spec = rho_s;
    results.firm_t_h = one_sample_t(rho_h, 0.0);
    results.firm_t_spec = one_sample_t(rho_s, 0.0);
    for (int t = 0; t < n_tasks; ++t)
      results.rows.rows.push_back({{"economics", "firm"},
                                   {static_cast<double>(t), 0.0, rho_h[static_cast<std::size_t>(t)],
                                    rho_s[static_cast<std::size_t>(t)]}});
  }

  if (run_all || config.variant == "labour") {
    const int labour_seeds = std::min(config.seeds, 5);
    for (double lambda : config.lambda_values) {
      PenaltySpec p;
      p.lambda_c = lambda;
      std::vector<double> dists, specs;
      for (int s = 0; s < labour_seeds; ++s) {
        Rng rng = derive_rng(config.base_seed + static_cast<std::uint64_t>(s), 701);
        ProductionSystem system(random_init(2, rng, config.optimizer), Network::ring(2), resource);
        const OptimizationResult r =
            optimize(system, bimodal, {config.p, config.grid_size}, p, config.optimizer);
        dists.push_back(circ_dist(r.final_agents[0].mu, r.final_agents[1].mu));
        specs.push_back(specialisation_mean(r.final_agents));
      }
      results.labour_lambdas.push_back(lambda);
      results.labour_distance.push_back(mean_of(dists));
      results.labour_specialisation.push_back(mean_of(specs));
      results.rows.rows.push_back(
          {{"economics", "labour"},
           {0.0, lambda, mean_of(dists), mean_of(specs)}});
    }
  }
  return results;
}

// ---- hardware ---------------------------------------------------------------------

HardwareResults run_hardware(const ExperimentConfig& config) {
  HardwareResults results;
  results.rows.label_columns = {"experiment", "variant", "condition"};
  results.rows.value_columns = {"n_agents", "seed", "performance", "task_performance"};

  const bool run_all = config.variant.empty();

  if (run_all || config.variant == "lottery") {
    const int n = 6;
    const Network network = Network::ring(n);
    const double resource = 12.0;
    const Workload task = five_mix_task();
    const double stiffness = config.lambda_s > 0.0 ? config.lambda_s : 10.0;
    const LossSpec loss_spec{config.p, config.grid_size};

    const std::vector<std::string> condition_names = {"ideal", "aligned", "quasi_aligned",
                                                      "homogeneous"};
    std::vector<std::vector<double>> perf(4), task_perf(4);
    for (int s = 0; s < config.seeds; ++s) {
      Rng rng = derive_rng(config.base_seed + static_cast<std::uint64_t>(s), 811);
      const std::vector<AgentParams> init = random_init(n, rng, config.optimizer);

      auto run_condition = [&](const PenaltySpec& p) {
        ProductionSystem system(init, network, resource);
        const OptimizationResult r = optimize(system, task, loss_spec, p, config.optimizer);
        LossEvaluator ev(network, resource, task, loss_spec, p);
        const double lm = ev.mismatch_only(r.final_agents);
        return std::tuple<double, double, std::vector<AgentParams>>(
            1.0 / (1.0 + r.final_loss), 1.0 / (1.0 + lm), r.final_agents);
      };

      const auto [perf_ideal, tperf_ideal, ideal_agents] = run_condition(PenaltySpec{});

      PenaltySpec aligned;
      aligned.lambda_s = stiffness;
      for (const auto& a : ideal_agents) aligned.prior_mu.push_back(a.mu);
      const auto [perf_aligned, tperf_aligned, agents_aligned] = run_condition(aligned);

      PenaltySpec quasi = aligned;
      for (auto& m : quasi.prior_mu)
        m = Angle(m.value() + (rng.u01() < 0.5 ? -0.2 : 0.2));
      const auto [perf_quasi, tperf_quasi, agents_quasi] = run_condition(quasi);

      PenaltySpec homo;
      homo.lambda_s = stiffness;
      homo.prior_mu.assign(static_cast<std::size_t>(n), Angle(kPi));
      const auto [perf_homo, tperf_homo, agents_homo] = run_condition(homo);

      const double ps[4] = {perf_ideal, perf_aligned, perf_quasi, perf_homo};
      const double ts[4] = {tperf_ideal, tperf_aligned, tperf_quasi, tperf_homo};
      for (int c = 0; c < 4; ++c) {
        perf[static_cast<std::size_t>(c)].push_back(ps[c]);
        task_perf[static_cast<std::size_t>(c)].push_back(ts[c]);
        results.rows.rows.push_back({{"hardware", "lottery", condition_names[static_cast<std::size_t>(c)]},
                                     {static_cast<double>(n), static_cast<double>(s), ps[c], ts[c]}});
      }
    }
    for (int c = 0; c < 4; ++c)
      results.lottery.push_back({condition_names[static_cast<std::size_t>(c)],
                                 mean_of(perf[static_cast<std::size_t>(c)]),
                                 se_of(perf[static_cast<std::size_t>(c)]),
                                 mean_of(task_perf[static_cast<std::size_t>(c)])});
  }

  if (run_all || config.variant == "scaling") {
    const Workload task = bimodal_task();
    const double stiffness = config.lambda_s > 0.0 ? config.lambda_s : 10.0;
    for (int n : config.agent_counts) {
      const Network network = Network::ring(n);
      const double resource = 2.0 + std::log(static_cast<double>(n));
      std::vector<double> perf_het(static_cast<std::size_t>(config.seeds));
      std::vector<double> perf_homo(static_cast<std::size_t>(config.seeds));
      parallel_for(config.seeds, config.threads, [&](int s) {
        Rng rng = derive_rng(config.base_seed + static_cast<std::uint64_t>(s),
                             900 + static_cast<std::uint64_t>(n));
        const std::vector<AgentParams> init = random_init(n, rng, config.optimizer);
        PenaltySpec hetero;
        hetero.lambda_s = stiffness;
        for (int i = 0; i < n; ++i)
          hetero.prior_mu.push_back(Angle(i % 2 == 0 ? kPi / 2 : 3 * kPi / 2));
        PenaltySpec homo;
        homo.lambda_s = stiffness;
        homo.prior_mu.assign(static_cast<std::size_t>(n), Angle(kPi));
        ProductionSystem sys_h(init, network, resource);
        const OptimizationResult rh =
            optimize(sys_h, task, {config.p, config.grid_size}, hetero, config.optimizer);
        ProductionSystem sys_o(init, network, resource);
        const OptimizationResult ro =
            optimize(sys_o, task, {config.p, config.grid_size}, homo, config.optimizer);
        perf_het[static_cast<std::size_t>(s)] = 1.0 / (1.0 + rh.final_loss);
        perf_homo[static_cast<std::size_t>(s)] = 1.0 / (1.0 + ro.final_loss);
      });
      results.scaling_n.push_back(n);
      results.heterogeneous_curve.push_back(mean_of(perf_het));
      results.homogeneous_curve.push_back(mean_of(perf_homo));
      for (int s = 0; s < config.seeds; ++s) {
        results.rows.rows.push_back({{"hardware", "scaling", "heterogeneous"},
                                     {static_cast<double>(n), static_cast<double>(s),
                                      perf_het[static_cast<std::size_t>(s)], 0.0}});
        results.rows.rows.push_back({{"hardware", "scaling", "homogeneous"},
                                     {static_cast<double>(n), static_cast<double>(s),
                                      perf_homo[static_cast<std::size_t>(s)], 0.0}});
      }
    }
    auto n95 = [&](const std::vector<double>& curve) {
      const std::size_t tail = std::min<std::size_t>(4, curve.size());
      double plateau = 0.0;
      for (std::size_t i = curve.size() - tail; i < curve.size(); ++i) plateau += curve[i];
      plateau /= static_cast<double>(tail);
      for (std::size_t i = 0; i < curve.size(); ++i)
        if (curve[i] >= 0.95 * plateau) return results.scaling_n[i];
      return results.scaling_n.back();
    };
    results.n95_heterogeneous = n95(results.heterogeneous_curve);
    results.n95_homogeneous = n95(results.homogeneous_curve);
  }
  return results;
}

// ---- learning --------------------------------------------------------------------

LearningResults run_learning_scaling(const ExperimentConfig& config) {
  LearningResults results;
  results.rows.label_columns = {"experiment", "variant"};
  results.rows.value_columns = {"x1", "x2", "value_a", "value_b"};
  results.fits.label_columns = {"fit"};
  results.fits.value_columns = {"p1", "p2", "p3", "p4", "p5", "r_squared"};

  const Workload task = five_mix_task();
  const bool run_all = config.variant.empty();

  if (run_all || config.variant == "stiffness") {
    const int n = 4;
    const Network network = Network::ring(n);
    const double resource = 8.0;
    for (double lambda : config.lambda_values) {
      PenaltySpec p;
      p.lambda_s = lambda;
      p.prior_mu.assign(static_cast<std::size_t>(n), Angle(kPi));
      std::vector<double> hs(static_cast<std::size_t>(config.seeds));
      std::vector<double> perfs(static_cast<std::size_t>(config.seeds));
      parallel_for(config.seeds, config.threads, [&](int s) {
        Rng rng = derive_rng(config.base_seed + static_cast<std::uint64_t>(s), 1001);
        ProductionSystem system(random_init(n, rng, config.optimizer), network, resource);
        const OptimizationResult r =
            optimize(system, task, {config.p, config.grid_size}, p, config.optimizer);
        LossEvaluator ev(network, resource, task, {config.p, config.grid_size}, p);
        hs[static_cast<std::size_t>(s)] = heterogeneity(r.final_agents);
        perfs[static_cast<std::size_t>(s)] = 1.0 / (1.0 + ev.mismatch_only(r.final_agents));
      });
      results.stiffness_h.push_back(mean_of(hs));
      results.stiffness_perf.push_back(mean_of(perfs));
      results.rows.rows.push_back(
          {{"learning", "stiffness"}, {lambda, 0.0, mean_of(hs), mean_of(perfs)}});
    }
    results.stiffness_ols = ols_linear(results.stiffness_h, results.stiffness_perf);

    // Resource relaxation of the fully stiff (homogeneous) system.
    const double max_lambda = *std::max_element(config.lambda_values.begin(),
                                                config.lambda_values.end());
    PenaltySpec stiff;
    stiff.lambda_s = max_lambda;
    stiff.prior_mu.assign(static_cast<std::size_t>(n), Angle(kPi));
    for (double r_level : {8.0, 6.0, 5.0, 4.0, 3.0, 2.5, 2.0, 1.5, 1.0}) {
      std::vector<double> perfs(static_cast<std::size_t>(config.seeds));
      parallel_for(config.seeds, config.threads, [&](int s) {
        Rng rng = derive_rng(config.base_seed + static_cast<std::uint64_t>(s), 1002);
        ProductionSystem system(random_init(n, rng, config.optimizer), network, r_level);
        const OptimizationResult r =
            optimize(system, task, {config.p, config.grid_size}, stiff, config.optimizer);
        LossEvaluator ev(network, r_level, task, {config.p, config.grid_size}, stiff);
        perfs[static_cast<std::size_t>(s)] = 1.0 / (1.0 + ev.mismatch_only(r.final_agents));
      });
      results.relax_resources.push_back(r_level);
      results.relax_perf.push_back(mean_of(perfs));
      results.rows.rows.push_back(
          {{"learning", "relaxation"}, {r_level, 0.0, mean_of(perfs), 0.0}});
    }
  }

  if (run_all || config.variant == "chinchilla") {
    const double c_total = 512.0;
    const std::vector<int> d_values = {32, 64, 128, 256, 512};
    struct ChinCell {
      int n, d;
    };
    std::vector<ChinCell> cells;
    for (int n : config.agent_counts)
      for (int d : d_values) cells.push_back({n, d});
    std::vector<double> losses(cells.size());
    parallel_for(static_cast<int>(cells.size()), config.threads, [&](int idx) {
      const auto [n, d] = cells[static_cast<std::size_t>(idx)];
      const Network network = n == 1 ? Network::none(1) : Network::ring(n);
      const double resource = c_total / (static_cast<double>(n) * d);
      std::vector<double> seed_losses;
      for (int s = 0; s < 2; ++s) {
        Rng rng = derive_rng(config.base_seed + static_cast<std::uint64_t>(s),
                             2000 + static_cast<std::uint64_t>(idx));
        ProductionSystem system(random_init(n, rng, config.optimizer), network, resource);
        const OptimizationResult r = optimize(system, task, {config.p, d}, {}, config.optimizer);
        seed_losses.push_back(r.final_loss);
      }
      losses[static_cast<std::size_t>(idx)] = median_of(seed_losses);
    });
    for (std::size_t i = 0; i < cells.size(); ++i) {
      results.chin_n.push_back(cells[i].n);
      results.chin_d.push_back(cells[i].d);
      results.chin_loss.push_back(losses[i]);
      results.rows.rows.push_back({{"learning", "chinchilla"},
                                   {static_cast<double>(cells[i].n),
                                    static_cast<double>(cells[i].d), losses[i], 0.0}});
    }
    results.chin_fit = fit_chinchilla(results.chin_n, results.chin_d, results.chin_loss);
    results.fits.rows.push_back({{"chinchilla"},
                                 {results.chin_fit.param("A"), results.chin_fit.param("B"),
                                  results.chin_fit.param("L0"), results.chin_fit.param("alpha"),
                                  results.chin_fit.param("beta"), results.chin_fit.r_squared}});

    // Single-agent data sweep with resources proportional to 1/D.
    const double c_single = 64.0;
    for (int d : {16, 32, 64, 128, 256, 512, 1024}) {
      Rng rng = derive_rng(config.base_seed, 3000 + static_cast<std::uint64_t>(d));
      ProductionSystem system(random_init(1, rng, config.optimizer), Network::none(1),
                              c_single / d);
      const OptimizationResult r = optimize(system, task, {config.p, d}, {}, config.optimizer);
      results.one_agent_d.push_back(d);
      results.one_agent_loss.push_back(r.final_loss);
      results.rows.rows.push_back(
          {{"learning", "one_agent"}, {static_cast<double>(d), 0.0, r.final_loss, 0.0}});
    }
    results.one_agent_fit = fit_chinchilla_reduced(results.one_agent_d, results.one_agent_loss);
    results.fits.rows.push_back(
        {{"one_agent"},
         {results.one_agent_fit.param("B"), results.one_agent_fit.param("L0"),
          results.one_agent_fit.param("beta"), 0.0, 0.0, results.one_agent_fit.r_squared}});
  }
  return results;
}

// ---- feature correlations -----------------------------------------------------------

FeatureCorrelationResults run_features_correlation(const ExperimentConfig& config,
                                                   const ScalingResults& scaling) {
  if (scaling.curves.empty())
    throw std::invalid_argument("run_features_correlation: missing scaling results");
  const std::vector<Workload> workloads = resolve_catalogue(config.catalogue);
  if (workloads.size() != scaling.curves.size())
    throw std::invalid_argument("run_features_correlation: catalogue does not match fits");

  const Grid grid(2048);
  std::vector<std::array<double, 12>> feats;
  std::vector<double> h_inf;
  for (std::size_t i = 0; i < workloads.size(); ++i) {
    feats.push_back(feature_vector(workloads[i], grid).values());
    h_inf.push_back(scaling.curves[i].fit.param("H_inf"));
  }

  FeatureCorrelationResults results;
  results.rows.label_columns = {"feature"};
  results.rows.value_columns = {"r", "p_value", "significant", "defined"};
  const double alpha = 0.05 / 12.0;
  for (int f = 0; f < 12; ++f) {
    FeatureCorrelation fc;
    fc.feature = kFeatureNames[static_cast<std::size_t>(f)];
    std::vector<double> column;
    for (const auto& row : feats) column.push_back(row[static_cast<std::size_t>(f)]);
    bool constant = true;
    bool has_nan = false;
    for (double v : column) {
      if (v != column.front()) constant = false;
      if (std::isnan(v)) has_nan = true;
    }
    if (constant || has_nan) {
      fc.defined = false;
      fc.r = std::numeric_limits<double>::quiet_NaN();
      fc.p_value = std::numeric_limits<double>::quiet_NaN();
    } else {
      const TestResult t = pearson(column, h_inf);
      fc.r = t.statistic;
      fc.p_value = t.p_value;
      fc.significant = t.p_value < alpha;
    }
    results.rows.rows.push_back({{fc.feature},
                                 {fc.r, fc.p_value, fc.significant ? 1.0 : 0.0,
                                  fc.defined ? 1.0 : 0.0}});
    results.correlations.push_back(fc);
  }
  return results;
}

ResultTable features_table(const std::string& catalogue, int grid_size) {
  const std::vector<Workload> workloads = resolve_catalogue(catalogue);
  const Grid grid(grid_size);
  ResultTable table;
  table.label_columns = {"name"};
  table.value_columns.assign(kFeatureNames.begin(), kFeatureNames.end());
  for (const auto& w : workloads) {
    const auto values = feature_vector(w, grid).values();
    table.rows.push_back({{w.name}, std::vector<double>(values.begin(), values.end())});
  }
  return table;
}

// ---- ecology ---------------------------------------------------------------------

EcologyResults run_ecology(const ExperimentConfig& config) {
  EcologyResults results;
  results.rows.label_columns = {"experiment", "variant", "label"};
  results.rows.value_columns = {"x", "value_a", "value_b"};

  const bool run_all = config.variant.empty();

  if (run_all || config.variant == "radiations") {
    const Workload multi = catalogue_pics(8, "pics8")[4];  // five evenly spaced peaks
    const Workload flat = Workload::uniform(1.0 / kTwoPi, "uniform");
    for (const auto* wl : {&multi, &flat}) {
      for (int n : config.agent_counts) {
        RunSpec rs;
        rs.network = Network::ring(n);
        rs.resource = config.resolve_resource(n);
        rs.workload = *wl;
        rs.loss = {config.p, config.grid_size};
        rs.config = config.optimizer;
        rs.config.seed = cell_seed(config.base_seed, 4000 + static_cast<std::uint64_t>(n) * 2 +
                                                         (wl == &flat ? 1 : 0));
        const MonteCarloSummary mc = monte_carlo(rs, config.seeds, config.threads);
        if (wl == &multi) {
          results.radiation_n.push_back(n);
          results.radiation_spec_multi.push_back(mc.specialisation.mean);
        } else {
          results.radiation_spec_uniform.push_back(mc.specialisation.mean);
        }
        results.rows.rows.push_back({{"ecology", "radiations", wl->name},
                                     {static_cast<double>(n), mc.specialisation.mean,
                                      mc.specialisation.standard_error}});
      }
    }
  }

  const double resource = config.resource > 0.0 ? config.resource : 4.0;
  const ProductionSystem homo = fixed_pair(kPi, kPi, resource);
  const ProductionSystem hetero = fixed_pair(kPi / 2, 3 * kPi / 2, resource);

  if (run_all || config.variant == "insurance") {
    const std::vector<Workload> tasks = catalogue_unimodal16();
    std::vector<double> mean_h, mean_o, cv_h, cv_o;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      SeriesConfig sc;
      sc.grid_size = config.grid_size;
      sc.seed = cell_seed(config.base_seed, 7100 + t);
      const RobustnessStats so =
          robustness_stats(production_series(homo, EvolutionRegime::wave(), tasks[t], sc));
      const RobustnessStats sh =
          robustness_stats(production_series(hetero, EvolutionRegime::wave(), tasks[t], sc));
      mean_o.push_back(so.mean);
      mean_h.push_back(sh.mean);
      cv_o.push_back(so.cv);
      cv_h.push_back(sh.cv);
      results.rows.rows.push_back({{"ecology", "insurance", tasks[t].name},
                                   {static_cast<double>(t), sh.mean, so.mean}});
    }
    for (std::size_t i = 0; i < mean_h.size(); ++i) {
      results.insurance_mean_wins += mean_h[i] > mean_o[i];
      results.insurance_cv_wins += cv_h[i] < cv_o[i];
    }
    results.insurance_mean_test = paired_t(mean_h, mean_o);
    results.insurance_cv_test = paired_t(cv_h, cv_o);
  }

  if (run_all || config.variant == "portfolio") {
    const std::vector<Workload> markets = catalogue_unimodal16();
    std::vector<double> cv_h, cv_o;
    for (std::size_t t = 0; t < markets.size(); ++t) {
      SeriesConfig sc;
      sc.grid_size = config.grid_size;
      sc.seed = cell_seed(config.base_seed, 7200 + t);
      const EvolutionRegime market = EvolutionRegime::brownian(0.15, kTwoPi);
      const RobustnessStats so = robustness_stats(production_series(homo, market, markets[t], sc));
      const RobustnessStats sh = robustness_stats(production_series(hetero, market, markets[t], sc));
      cv_o.push_back(so.cv);
      cv_h.push_back(sh.cv);
      results.rows.rows.push_back({{"ecology", "portfolio", markets[t].name},
                                   {static_cast<double>(t), sh.cv, so.cv}});
    }
    for (std::size_t i = 0; i < cv_h.size(); ++i) results.portfolio_cv_wins += cv_h[i] < cv_o[i];
    results.portfolio_cv_test = paired_t(cv_h, cv_o);
  }
  return results;
}

// ---- file driver -------------------------------------------------------------------

namespace {

void apply_full_scale(ExperimentConfig& c) {
  if (!c.full) return;
  if (c.experiment == "scaling" || c.experiment == "features") c.seeds = 20;
  if (c.experiment == "topology") c.seeds = c.topology == "three_tier" ? 100 : 200;
  if (c.experiment == "efficiency") c.seeds = 20;
  if (c.experiment == "economics") {
    c.tasks = 50;
    c.seeds = 20;
  }
  if (c.experiment == "hardware") c.seeds = 20;
  if (c.experiment == "learning") c.seeds = 8;
  if (c.experiment == "ecology") c.seeds = 12;
}

void write_sidecar(const ExperimentConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  json j = json::parse(config_to_json(config));
  j["format"] = "prodsys-result-v1";
  out << j.dump(2) << "\n";
}

void save_fit_table(const ResultTable& fits, const std::string& path) {
  if (!fits.rows.empty()) fits.save_csv(path);
}

}  // namespace

int run_experiment_to_files(const ExperimentConfig& config_in) {
  ExperimentConfig config = config_in;
  apply_full_scale(config);
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  const std::string base = config.out_dir + "/" + config.experiment;

  if (config.experiment == "scaling") {
    const ScalingResults r = run_scaling(config);
    r.rows.save_csv(base + ".csv");
    save_fit_table(r.fits, base + "_fits.csv");
  } else if (config.experiment == "topology") {
    const TopologyResults r = run_topology(config);
    r.rows.save_csv(base + ".csv");
  } else if (config.experiment == "commcost") {
    const CommCostResults r = run_comm_cost_sweep(config);
    r.rows.save_csv(base + ".csv");
  } else if (config.experiment == "efficiency") {
    const EfficiencyResults r = run_efficiency(config);
    r.rows.save_csv(base + ".csv");
    ResultTable terciles;
    terciles.label_columns = {"regime"};
    terciles.value_columns = {"pearson_r", "f_statistic", "p_value", "error_ratio"};
    for (const auto& t : r.terciles)
      terciles.rows.push_back({{t.regime}, {t.pearson_r, t.f_statistic, t.p_value, t.error_ratio}});
    terciles.save_csv(base + "_fits.csv");
  } else if (config.experiment == "robustness") {
    const RobustnessResults r = run_robustness(config);
    r.rows.save_csv(base + ".csv");
    r.tests.save_csv(base + "_tests.csv");
  } else if (config.experiment == "economics") {
    const EconomicsResults r = run_economics(config);
    r.rows.save_csv(base + ".csv");
  } else if (config.experiment == "hardware") {
    const HardwareResults r = run_hardware(config);
    r.rows.save_csv(base + ".csv");
  } else if (config.experiment == "learning") {
    const LearningResults r = run_learning_scaling(config);
    r.rows.save_csv(base + ".csv");
    save_fit_table(r.fits, base + "_fits.csv");
  } else if (config.experiment == "features") {
    const ScalingResults scaling = run_scaling(config);
    const FeatureCorrelationResults r = run_features_correlation(config, scaling);
    features_table(config.catalogue).save_csv(base + ".csv");
    r.rows.save_csv(base + "_correlations.csv");
    scaling.fits.save_csv(base + "_fits.csv");
  } else if (config.experiment == "ecology") {
    const EcologyResults r = run_ecology(config);
    r.rows.save_csv(base + ".csv");
  } else {
    throw std::invalid_argument("unknown experiment: " + config.experiment);
  }
  write_sidecar(config, base + "_config.json");
  return 0;
}

}  // namespace prodsys
