#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "prodsys/catalogue.hpp"
#include "prodsys/dynamics.hpp"
#include "prodsys/features.hpp"
#include "prodsys/metrics.hpp"
#include "prodsys/objective.hpp"
#include "prodsys/stats.hpp"

namespace prodsys {

// One row of results: string condition labels followed by numeric values,
// matching the table's column lists.
struct ResultRow {
  std::vector<std::string> labels;
  std::vector<double> values;
};

struct ResultTable {
  std::vector<std::string> label_columns;
  std::vector<std::string> value_columns;
  std::vector<ResultRow> rows;

  void write_csv(std::ostream& out) const;
  void save_csv(const std::string& path) const;
};

std::string format_double(double v);

struct ExperimentConfig {
  std::string experiment = "scaling";
  std::string catalogue;              // built-in name or path to a catalogue file
  std::vector<int> agent_counts;      // size sweeps
  std::string topology = "ring";      // ring | star | three_tier | blocks | none | complete
  std::vector<int> block_sizes;
  std::string resource_rule;          // "2N" or "2+logN"; empty uses `resource`
  double resource = -1.0;
  std::vector<double> resource_values;
  std::vector<double> lambda_values;  // penalty sweep grid
  double lambda_c = 0.0;
  double lambda_s = 0.0;
  int seeds = 10;
  int tasks = 20;
  int threads = 1;
  bool full = false;
  std::string variant;                // experiment-specific sub-selection
  int grid_size = 512;
  double p = 2.0;
  std::uint64_t base_seed = 1;
  OptimizerConfig optimizer;
  std::string out_dir = "out";

  double resolve_resource(int n_agents) const;
};

// Defaults matching the desk-scale experiment setups.
ExperimentConfig default_config(const std::string& experiment);

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

std::vector<Workload> resolve_catalogue(const std::string& name_or_path);

// ---- scaling (heterogeneity vs system size) --------------------------------

struct ScalingCurve {
  std::string workload;
  std::vector<int> agent_counts;
  std::vector<double> median_h;
  std::vector<double> median_spec;
  FitResult fit;  // log-logistic fit of median_h against agent_counts
};

struct ScalingResults {
  std::vector<ScalingCurve> curves;
  ResultTable rows;
  ResultTable fits;
};

ScalingResults run_scaling(const ExperimentConfig& config);

// ---- topology (star / three-tier / component blocks) -----------------------

struct TierStat {
  std::string tier;
  double mean = 0.0;
  double se = 0.0;
};

struct BlockStat {
  int block_size = 0;
  double median_loss = 0.0;
  double median_h_sys = 0.0;
  double median_h_within = 0.0;
};

struct TopologyResults {
  std::vector<TierStat> tiers;
  std::vector<BlockStat> blocks;
  ResultTable rows;
};

TopologyResults run_topology(const ExperimentConfig& config);

// ---- communication-cost sweep ----------------------------------------------

struct CommCostResults {
  std::vector<double> lambdas;
  std::vector<double> median_within;
  std::vector<double> median_between;
  ResultTable rows;
};

CommCostResults run_comm_cost_sweep(const ExperimentConfig& config);

// ---- efficiency (resource x stiffness grid) --------------------------------

struct TercileStat {
  std::string regime;
  double pearson_r = 0.0;
  double f_statistic = 0.0;
  double p_value = 1.0;
  double error_ratio = 1.0;  // restricted/full test error on a 70/30 split
};

struct EfficiencyResults {
  ResultTable rows;
  double pooled_r = 0.0;
  std::vector<TercileStat> terciles;  // abundant, mid, scarce
};

EfficiencyResults run_efficiency(const ExperimentConfig& config);

// ---- robustness under drifting demand --------------------------------------

struct RobustnessCell {
  std::string catalogue;
  std::string regime;
  int task_id = 0;
  RobustnessStats homogeneous;
  RobustnessStats heterogeneous;
};

struct RobustnessResults {
  std::vector<RobustnessCell> cells;
  ResultTable rows;
  ResultTable tests;
};

RobustnessResults run_robustness(const ExperimentConfig& config);

// ---- economics (trade, firm Monte Carlo, labour friction) ------------------

struct TradeRow {
  int seed = 0;
  double consumption_trade = 0.0;
  double consumption_autarchy = 0.0;
};

struct EconomicsResults {
  std::vector<TradeRow> trade;
  std::vector<double> firm_spearman_h;
  std::vector<double> firm_spearman_spec;
  TestResult firm_t_h;
  TestResult firm_t_spec;
  std::vector<double> labour_lambdas;
  std::vector<double> labour_distance;
  std::vector<double> labour_specialisation;
  ResultTable rows;
};

EconomicsResults run_economics(const ExperimentConfig& config);

// ---- hardware priors (lottery conditions + scaling curves) -----------------

struct HardwareCondition {
  std::string name;
  double performance = 0.0;       // 1 / (1 + total loss)
  double performance_se = 0.0;
  double task_performance = 0.0;  // 1 / (1 + mismatch only)
};

struct HardwareResults {
  std::vector<HardwareCondition> lottery;  // ideal, aligned, quasi_aligned, homogeneous
  std::vector<int> scaling_n;
  std::vector<double> heterogeneous_curve;
  std::vector<double> homogeneous_curve;
  int n95_heterogeneous = 0;
  int n95_homogeneous = 0;
  ResultTable rows;
};

HardwareResults run_hardware(const ExperimentConfig& config);

// ---- learning performance and two-resource scaling -------------------------

struct LearningResults {
  std::vector<double> stiffness_h;
  std::vector<double> stiffness_perf;
  OlsResult stiffness_ols;
  std::vector<double> relax_resources;
  std::vector<double> relax_perf;
  std::vector<double> chin_n, chin_d, chin_loss;
  FitResult chin_fit;
  std::vector<double> one_agent_d, one_agent_loss;
  FitResult one_agent_fit;
  ResultTable rows;
  ResultTable fits;
};

LearningResults run_learning_scaling(const ExperimentConfig& config);

// ---- workload-feature correlations ------------------------------------------

struct FeatureCorrelation {
  std::string feature;
  bool defined = true;  // false when the feature column is constant
  double r = 0.0;
  double p_value = 1.0;
  bool significant = false;  // Bonferroni alpha / 12
};

struct FeatureCorrelationResults {
  std::vector<FeatureCorrelation> correlations;
  ResultTable rows;
};

FeatureCorrelationResults run_features_correlation(const ExperimentConfig& config,
                                                   const ScalingResults& scaling);

// One row per catalogue workload, 12 feature columns (the `features` command).
ResultTable features_table(const std::string& catalogue, int grid_size = 2048);

// ---- ecology (radiations, insurance, portfolio) ----------------------------

struct EcologyResults {
  std::vector<int> radiation_n;
  std::vector<double> radiation_spec_multi;
  std::vector<double> radiation_spec_uniform;
  int insurance_mean_wins = 0;  // tasks where the heterogeneous pair wins on mean
  int insurance_cv_wins = 0;
  TestResult insurance_mean_test;
  TestResult insurance_cv_test;
  int portfolio_cv_wins = 0;
  TestResult portfolio_cv_test;
  ResultTable rows;
};

EcologyResults run_ecology(const ExperimentConfig& config);

// Writes <out>/<experiment>.csv (plus _fits.csv where applicable) and a
// JSON sidecar with the resolved config. Returns the process exit code.
int run_experiment_to_files(const ExperimentConfig& config);

}  // namespace prodsys
