#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "prodsys/catalogue.hpp"
#include "prodsys/dynamics.hpp"
#include "prodsys/experiments.hpp"
#include "prodsys/features.hpp"
#include "prodsys/metrics.hpp"
#include "prodsys/objective.hpp"
#include "prodsys/stats.hpp"

namespace py = pybind11;
using namespace prodsys;

namespace {

Workload make_workload(const std::string& kind,
                       const std::vector<std::tuple<double, double, double>>& components,
                       double uniform_level, const std::vector<double>& table,
                       const std::string& name) {
  if (kind == "uniform") return Workload::uniform(uniform_level, name);
  if (kind == "tabulated") return Workload::tabulated(table, name);
  std::vector<WorkloadComponent> comps;
  for (const auto& [c, s, w] : components) comps.push_back({c, s, w});
  return Workload::mixture(std::move(comps), uniform_level, name);
}

Network make_network(const std::string& topology, int size, bool include_identity) {
  if (topology == "ring") return Network::ring(size);
  if (topology == "none") return Network::none(size);
  if (topology == "complete") return Network::complete(size);
  if (topology == "star") return Network::star(size - 1);
  throw std::invalid_argument("unknown topology: " + topology);
  (void)include_identity;
}

std::vector<AgentParams> to_agents(const std::vector<std::pair<double, double>>& params) {
  std::vector<AgentParams> agents;
  for (const auto& [mu, sigma] : params) agents.emplace_back(Angle(mu), sigma);
  return agents;
}

py::dict test_result_dict(const TestResult& r) {
  py::dict d;
  d["statistic"] = r.statistic;
  d["p_value"] = r.p_value;
  d["n"] = r.n;
  return d;
}

py::dict fit_result_dict(const FitResult& r) {
  py::dict d;
  for (std::size_t i = 0; i < r.names.size(); ++i) d[r.names[i].c_str()] = r.params[i];
  d["residual"] = r.residual;
  d["r_squared"] = r.r_squared;
  d["converged"] = r.converged;
  return d;
}

}  // namespace

PYBIND11_MODULE(_prodsys, m) {
  m.doc() = "Distributed production system simulation toolkit";

  py::class_<Grid>(m, "Grid")
      .def(py::init<int>())
      .def_property_readonly("size", &Grid::size)
      .def_property_readonly("spacing", &Grid::spacing)
      .def("nodes", [](const Grid& g) { return g.nodes(); });

  py::class_<Workload>(m, "Workload")
      .def_static("uniform", [](double level) { return Workload::uniform(level); })
      .def_static("mixture",
                  [](const std::vector<std::tuple<double, double, double>>& comps,
                     double uniform_level) {
                    return make_workload("mixture", comps, uniform_level, {}, "");
                  },
                  py::arg("components"), py::arg("uniform_level") = 0.0)
      .def_static("tabulated", [](const std::vector<double>& v) { return Workload::tabulated(v); })
      .def("eval", &Workload::eval)
      .def("rotated", &Workload::rotated)
      .def_readonly("name", &Workload::name);

  py::class_<Network>(m, "Network")
      .def_static("ring", &Network::ring)
      .def_static("none", &Network::none)
      .def_static("complete", &Network::complete)
      .def_static("star", &Network::star)
      .def_static("blocks", &Network::blocks)
      .def_static("two_cluster_bridge", &Network::two_cluster_bridge)
      .def_static("three_tier", &Network::three_tier)
      .def_static("from_matrix", &Network::from_matrix)
      .def_property_readonly("size", &Network::size)
      .def("q", &Network::q);

  m.def("circ_dist", [](double a, double b) { return circ_dist(a, b); });
  m.def("wrap_angle", &wrap_angle);
  m.def(
      "wg_pdf",
      [](double mu, double sigma, double theta) {
        return wg_pdf(WrappedGaussian(Angle(mu), sigma), theta);
      },
      py::arg("mu"), py::arg("sigma"), py::arg("theta"));
  m.def("wg_extrema", [](double mu, double sigma) {
    const WgExtrema e = wg_extrema(WrappedGaussian(Angle(mu), sigma));
    return std::make_pair(e.max_value, e.min_value);
  });

  m.def("connected_components", [](const Network& n) {
    return connected_components(n).components;
  });
  m.def("agent_weights", [](const Network& n) {
    const AgentWeights w = agent_weights(n);
    py::dict d;
    d["alpha"] = w.alpha;
    d["mean"] = w.mean;
    d["deviation"] = w.deviation;
    return d;
  });
  m.def("workload_eval",
        [](const Workload& w, int grid_size) { return workload_eval(w, Grid(grid_size)); });
  m.def("joint_production",
        [](const std::vector<std::pair<double, double>>& agents, const Network& network,
           double resource, int grid_size) {
          const JointProduction jp =
              joint_production(ProductionSystem(to_agents(agents), network, resource),
                               Grid(grid_size));
          py::dict d;
          d["pooled"] = jp.pooled;
          d["per_component"] = jp.per_component;
          return d;
        });

  m.def("specialisation_mean", [](const std::vector<std::pair<double, double>>& agents) {
    return specialisation_mean(to_agents(agents));
  });
  m.def("similarity", [](double mu1, double s1, double mu2, double s2) {
    return similarity(AgentParams(Angle(mu1), s1), AgentParams(Angle(mu2), s2));
  });
  m.def("heterogeneity", [](const std::vector<std::pair<double, double>>& agents) {
    return heterogeneity(to_agents(agents));
  });
  m.def("diversity_q",
        [](const std::vector<std::vector<double>>& z, const std::vector<double>& p, double q) {
          SimilarityMatrix m2;
          m2.size = static_cast<int>(z.size());
          for (const auto& row : z)
            for (double v : row) m2.z.push_back(v);
          return diversity_q(m2, p, q);
        });
  m.def("productivity", &productivity);

  m.def(
      "mismatch_loss",
      [](const std::vector<std::pair<double, double>>& agents, const Network& network,
         double resource, const Workload& w0, double p, int grid_size) {
        return mismatch_loss(ProductionSystem(to_agents(agents), network, resource), w0,
                             LossSpec{p, grid_size});
      },
      py::arg("agents"), py::arg("network"), py::arg("resource"), py::arg("workload"),
      py::arg("p") = 2.0, py::arg("grid_size") = 512);

  m.def(
      "optimize",
      [](const std::vector<std::pair<double, double>>& agents, const Network& network,
         double resource, const Workload& w0, double p, int grid_size, double learning_rate,
         int max_steps, int patience, double lambda_c, double lambda_s,
         const std::vector<double>& prior_mu) {
        LossSpec spec{p, grid_size};
        PenaltySpec penalties;
        penalties.lambda_c = lambda_c;
        penalties.lambda_s = lambda_s;
        for (double v : prior_mu) penalties.prior_mu.push_back(Angle(v));
        OptimizerConfig config;
        config.learning_rate = learning_rate;
        config.max_steps = max_steps;
        config.patience = patience;
        const OptimizationResult r = optimize(
            ProductionSystem(to_agents(agents), network, resource), w0, spec, penalties, config);
        py::dict d;
        std::vector<std::pair<double, double>> out;
        for (const auto& a : r.final_agents) out.emplace_back(a.mu.value(), a.sigma);
        d["final_agents"] = out;
        d["final_loss"] = r.final_loss;
        d["steps_taken"] = r.steps_taken;
        d["converged"] = r.converged;
        d["loss_trace"] = r.loss_trace;
        return d;
      },
      py::arg("agents"), py::arg("network"), py::arg("resource"), py::arg("workload"),
      py::arg("p") = 2.0, py::arg("grid_size") = 512, py::arg("learning_rate") = 0.01,
      py::arg("max_steps") = 5000, py::arg("patience") = 100, py::arg("lambda_c") = 0.0,
      py::arg("lambda_s") = 0.0, py::arg("prior_mu") = std::vector<double>{});

  m.def(
      "feature_vector",
      [](const Workload& w, int grid_size) {
        const FeatureVector f = feature_vector(w, Grid(grid_size));
        py::dict d;
        const auto values = f.values();
        for (std::size_t i = 0; i < values.size(); ++i) d[kFeatureNames[i]] = values[i];
        return d;
      },
      py::arg("workload"), py::arg("grid_size") = 2048);

  m.def("catalogue", [](const std::string& name) { return catalogue_by_name(name); });
  m.def("catalogue_names", []() { return catalogue_names(); });

  m.def(
      "production_series",
      [](const std::vector<std::pair<double, double>>& agents, const Network& network,
         double resource, const std::string& regime, const Workload& base, int steps,
         double periods, int grid_size, std::uint64_t seed) {
        EvolutionRegime r;
        if (regime == "wave")
          r = EvolutionRegime::wave();
        else if (regime == "brownian")
          r = EvolutionRegime::brownian();
        else if (regime == "extreme")
          r = EvolutionRegime::extreme();
        else
          throw std::invalid_argument("unknown regime: " + regime);
        SeriesConfig config;
        config.steps = steps;
        config.periods = periods;
        config.grid_size = grid_size;
        config.seed = seed;
        const TimeSeries s = production_series(
            ProductionSystem(to_agents(agents), network, resource), r, base, config);
        const RobustnessStats stats = robustness_stats(s);
        py::dict d;
        d["times"] = s.times;
        d["values"] = s.values;
        d["mean"] = stats.mean;
        d["cv"] = stats.cv;
        d["min"] = stats.minimum;
        return d;
      },
      py::arg("agents"), py::arg("network"), py::arg("resource"), py::arg("regime"),
      py::arg("base"), py::arg("steps") = 1000, py::arg("periods") = 10.0,
      py::arg("grid_size") = 512, py::arg("seed") = 0);

  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) {
    return test_result_dict(pearson(x, y));
  });
  m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) {
    return test_result_dict(spearman(x, y));
  });
  m.def("paired_t", [](const std::vector<double>& x, const std::vector<double>& y) {
    return test_result_dict(paired_t(x, y));
  });
  m.def("one_sample_t", [](const std::vector<double>& d, double mu0) {
    return test_result_dict(one_sample_t(d, mu0));
  });
  m.def("wilcoxon_signed_rank", [](const std::vector<double>& x, const std::vector<double>& y) {
    return test_result_dict(wilcoxon_signed_rank(x, y));
  });
  m.def("ols_linear", [](const std::vector<double>& x, const std::vector<double>& y) {
    const OlsResult r = ols_linear(x, y);
    py::dict d;
    d["slope"] = r.slope;
    d["intercept"] = r.intercept;
    d["r_squared"] = r.r_squared;
    d["residual"] = r.residual;
    return d;
  });
  m.def("nested_f_test", [](double full_sse, double restricted_sse, int df_full,
                            int df_restricted, int n) {
    return test_result_dict(nested_f_test(full_sse, restricted_sse, df_full, df_restricted, n));
  });
  m.def("fit_log_logistic", [](const std::vector<double>& n, const std::vector<double>& h) {
    return fit_result_dict(fit_log_logistic(n, h));
  });
  m.def("fit_chinchilla", [](const std::vector<double>& n, const std::vector<double>& d,
                             const std::vector<double>& l) {
    return fit_result_dict(fit_chinchilla(n, d, l));
  });
  m.def("fit_chinchilla_reduced",
        [](const std::vector<double>& d, const std::vector<double>& l) {
          return fit_result_dict(fit_chinchilla_reduced(d, l));
        });
}
