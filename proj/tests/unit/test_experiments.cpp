#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "prodsys/experiments.hpp"

using namespace prodsys;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config round-trip is idempotent") {
  for (const std::string name :
       {"scaling", "topology", "commcost", "efficiency", "robustness", "economics", "hardware",
        "learning", "features", "ecology"}) {
    const ExperimentConfig c = default_config(name);
    const std::string once = config_to_json(c);
    const std::string twice = config_to_json(config_from_json(once));
    CHECK(once == twice);
  }
}

TEST_CASE("resource rules") {
  ExperimentConfig c = default_config("scaling");
  CHECK(c.resolve_resource(8) == doctest::Approx(16.0));
  c.resource_rule = "2+logN";
  CHECK(c.resolve_resource(8) == doctest::Approx(2.0 + std::log(8.0)));
  c.resource_rule = "";
  c.resource = 7.5;
  CHECK(c.resolve_resource(8) == doctest::Approx(7.5));
  c.resource = -1.0;
  CHECK_THROWS_AS(c.resolve_resource(8), std::invalid_argument);
}

TEST_CASE("catalogues are well formed") {
  const Grid grid(1024);
  for (const auto& name : catalogue_names()) {
    const std::vector<Workload> workloads = catalogue_by_name(name);
    const std::size_t expected = name == "pics8" ? 8 : (name == "pics9" ? 9 : 16);
    CHECK(workloads.size() == expected);
    for (const auto& w : workloads) {
      CHECK(!w.name.empty());
      // every catalogue entry carries unit demand mass
      CHECK(integrate(workload_eval(w, grid), grid) == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("catalogue files round-trip") {
  const std::string path = std::filesystem::temp_directory_path() / "prodsys_cat_test.json";
  const std::vector<Workload> original = catalogue_by_name("pics8");
  save_catalogue_file(original, path);
  const std::vector<Workload> loaded = load_catalogue_file(path);
  REQUIRE(loaded.size() == original.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i].name == original[i].name);
    REQUIRE(loaded[i].components.size() == original[i].components.size());
    for (std::size_t j = 0; j < loaded[i].components.size(); ++j) {
      CHECK(loaded[i].components[j].center == original[i].components[j].center);
      CHECK(loaded[i].components[j].spread == original[i].components[j].spread);
      CHECK(loaded[i].components[j].weight == original[i].components[j].weight);
    }
  }
  std::remove(path.c_str());
}

TEST_CASE("result tables serialise deterministically") {
  ResultTable t;
  t.label_columns = {"name"};
  t.value_columns = {"x", "y"};
  t.rows.push_back({{"a"}, {1.0, 2.5}});
  t.rows.push_back({{"b"}, {0.1, 1e-9}});
  std::stringstream a, b;
  t.write_csv(a);
  t.write_csv(b);
  CHECK(a.str() == b.str());
  CHECK(a.str().substr(0, 9) == "name,x,y\n");
}

TEST_CASE("identical configs give byte-identical result files") {
  ExperimentConfig c = default_config("robustness");
  c.catalogue = "unimodal16";
  c.variant = "wave";
  c.grid_size = 128;

  namespace fs = std::filesystem;
  const fs::path dir1 = fs::temp_directory_path() / "prodsys_repro_1";
  const fs::path dir2 = fs::temp_directory_path() / "prodsys_repro_2";
  c.out_dir = dir1.string();
  run_experiment_to_files(c);
  c.out_dir = dir2.string();
  run_experiment_to_files(c);
  CHECK(read_file((dir1 / "robustness.csv").string()) ==
        read_file((dir2 / "robustness.csv").string()));
  CHECK(!read_file((dir1 / "robustness.csv").string()).empty());
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("row completeness: one row per seed and condition") {
  ExperimentConfig c = default_config("commcost");
  c.lambda_values = {0.0, 0.01};
  c.seeds = 3;
  c.grid_size = 128;
  c.optimizer.max_steps = 50;
  c.optimizer.patience = 25;
  const CommCostResults r = run_comm_cost_sweep(c);
  CHECK(r.rows.rows.size() == 6);
  // each (lambda, seed) appears exactly once
  std::set<std::pair<double, double>> seen;
  for (const auto& row : r.rows.rows) seen.insert({row.values[0], row.values[1]});
  CHECK(seen.size() == 6);
}

TEST_CASE("features table lists all 12 features per workload") {
  const ResultTable t = features_table("pics8", 512);
  CHECK(t.value_columns.size() == 12);
  CHECK(t.rows.size() == 8);
  for (const auto& row : t.rows) CHECK(row.values.size() == 12);
}
