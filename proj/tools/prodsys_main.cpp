#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prodsys/experiments.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  int threads = 0;
  bool full = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "base seed");
  cmd->add_option("--threads", opts.threads, "worker threads");
  cmd->add_flag("--full", opts.full, "run at the full (slow) scale");
}

prodsys::ExperimentConfig make_config(const std::string& experiment, const CommonOptions& opts) {
  prodsys::ExperimentConfig config = opts.config_path.empty()
                                         ? prodsys::default_config(experiment)
                                         : prodsys::load_config_file(opts.config_path);
  config.experiment = experiment;
  if (!opts.out_dir.empty()) config.out_dir = opts.out_dir;
  if (opts.seed >= 0) config.base_seed = static_cast<std::uint64_t>(opts.seed);
  if (opts.threads > 0) config.threads = opts.threads;
  if (opts.full) config.full = true;
  return config;
}

int run_optimize(const prodsys::ExperimentConfig& config) {
  using namespace prodsys;
  const std::vector<Workload> catalogue =
      config.catalogue.empty() ? std::vector<Workload>{Workload::mixture(
                                     {{kPi / 2, 0.5, 0.5}, {3 * kPi / 2, 0.5, 0.5}}, 0.0, "bimodal")}
                               : resolve_catalogue(config.catalogue);
  const int n = config.agent_counts.empty() ? 2 : config.agent_counts.front();
  RunSpec rs;
  rs.network = config.topology == "none" ? Network::none(n) : Network::ring(n);
  rs.resource = config.resolve_resource(n);
  rs.workload = catalogue.front();
  rs.loss = {config.p, config.grid_size};
  rs.penalties.lambda_c = config.lambda_c;
  if (config.lambda_s > 0.0) {
    rs.penalties.lambda_s = config.lambda_s;
    rs.penalties.prior_mu.assign(static_cast<std::size_t>(n), Angle(kPi));
  }
  rs.config = config.optimizer;
  rs.config.seed = config.base_seed;
  const MonteCarloSummary mc = monte_carlo(rs, config.seeds, config.threads);

  std::filesystem::create_directories(config.out_dir);
  ResultTable table;
  table.label_columns = {"experiment"};
  table.value_columns = {"seed", "loss", "heterogeneity", "specialisation", "productivity",
                         "steps", "converged"};
  for (int s = 0; s < config.seeds; ++s) {
    const auto& r = mc.runs[static_cast<std::size_t>(s)];
    table.rows.push_back({{"optimize"},
                          {static_cast<double>(s), r.final_loss, heterogeneity(r.final_agents),
                           specialisation_mean(r.final_agents), productivity(r.final_loss),
                           static_cast<double>(r.steps_taken), r.converged ? 1.0 : 0.0}});
  }
  table.save_csv(config.out_dir + "/optimize.csv");
  std::cout << "optimize: " << config.seeds << " run(s), median loss "
            << format_double(mc.loss.median) << "\n";
  return 0;
}

int run_catalogues(const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (const auto& name : prodsys::catalogue_names())
    prodsys::save_catalogue_file(prodsys::catalogue_by_name(name), out_dir + "/" + name + ".json");
  std::cout << "wrote " << prodsys::catalogue_names().size() << " catalogue files to " << out_dir
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed production system simulation and optimisation toolkit"};
  app.require_subcommand(1);

  const std::vector<std::string> experiments = {"optimize",  "scaling",  "topology", "commcost",
                                                "efficiency", "robustness", "economics", "hardware",
                                                "learning",  "features", "ecology"};
  std::map<std::string, CommonOptions> options;
  for (const auto& name : experiments) {
    CLI::App* cmd = app.add_subcommand(name, "run the " + name + " experiment");
    add_common(cmd, options[name]);
  }
  std::string catalogue_out = "data/catalogues";
  CLI::App* cat_cmd = app.add_subcommand("catalogues", "write the built-in workload catalogues");
  cat_cmd->add_option("--out", catalogue_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cat_cmd->parsed()) return run_catalogues(catalogue_out);
    for (const auto& name : experiments) {
      if (!app.get_subcommand(name)->parsed()) continue;
      const prodsys::ExperimentConfig config = make_config(name, options[name]);
      if (name == "optimize") return run_optimize(config);
      return prodsys::run_experiment_to_files(config);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
