#include "prodsys/catalogue.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace prodsys {
namespace {

using nlohmann::json;

json workload_json(const Workload& w) {
  json j;
  j["name"] = w.name;
  switch (w.kind) {
    case Workload::Kind::uniform:
      j["kind"] = "uniform";
      break;
    case Workload::Kind::mixture:
      j["kind"] = "mixture";
      break;
    case Workload::Kind::tabulated:
      j["kind"] = "tabulated";
      break;
  }
  j["uniform_level"] = w.uniform_level;
  j["components"] = json::array();
  for (const auto& c : w.components)
    j["components"].push_back({{"center", c.center}, {"spread", c.spread}, {"weight", c.weight}});
  if (w.kind == Workload::Kind::tabulated) j["table"] = w.table;
  return j;
}

Workload workload_from(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const std::string name = j.value("name", "");
  if (kind == "uniform") return Workload::uniform(j.value("uniform_level", 0.0), name);
  if (kind == "tabulated") return Workload::tabulated(j.at("table").get<std::vector<double>>(), name);
  if (kind != "mixture") throw std::invalid_argument("workload: unknown kind " + kind);
  std::vector<WorkloadComponent> comps;
  for (const auto& c : j.at("components"))
    comps.push_back({c.at("center").get<double>(), c.at("spread").get<double>(),
                     c.at("weight").get<double>()});
  return Workload::mixture(std::move(comps), j.value("uniform_level", 0.0), name);
}

Workload evenly_spaced(int peaks, double sigma, double phase, const std::string& name) {
  std::vector<WorkloadComponent> comps;
  for (int j = 0; j < peaks; ++j)
    comps.push_back({wrap_angle(phase + j * kTwoPi / peaks), sigma, 1.0 / peaks});
  return Workload::mixture(std::move(comps), 0.0, name);
}

}  // namespace

std::vector<Workload> catalogue_pics(int max_peaks, const std::string& prefix) {
  std::vector<Workload> out;
  for (int k = 1; k <= max_peaks; ++k)
    out.push_back(evenly_spaced(k, 0.25, kPi / k, prefix + "_" + std::to_string(k)));
  return out;
}

std::vector<Workload> catalogue_unimodal16() {
  std::vector<Workload> out;
  for (int i = 0; i < 16; ++i) {
    const double center = i * kTwoPi / 16.0;
    const double sigma = 0.3 + (2.0 - 0.3) * i / 15.0;
    out.push_back(Workload::mixture({{center, sigma, 1.0}}, 0.0, "unimodal_" + std::to_string(i)));
  }
  return out;
}

std::vector<Workload> catalogue_homosuited16() {
  std::vector<Workload> out;
  for (int i = 0; i < 16; ++i) {
    const double sigma = 0.3 + (2.0 - 0.3) * i / 15.0;
    out.push_back(Workload::mixture({{kPi, sigma, 1.0}}, 0.0, "homosuited_" + std::to_string(i)));
  }
  return out;
}

std::vector<Workload> catalogue_diverse16() {
  std::vector<Workload> out;
  out.push_back(Workload::uniform(1.0 / kTwoPi, "diverse_uniform"));
  // Unimodal with increasing breadth.
  out.push_back(Workload::mixture({{kPi, 0.4, 1.0}}, 0.0, "diverse_uni_narrow"));
  out.push_back(Workload::mixture({{kPi / 2, 0.8, 1.0}}, 0.0, "diverse_uni_mid"));
  out.push_back(Workload::mixture({{4.8, 1.4, 1.0}}, 0.0, "diverse_uni_broad"));
  // Bimodal: symmetric, asymmetric weights, asymmetric breadths.
  out.push_back(Workload::mixture({{kPi / 2, 0.5, 0.5}, {3 * kPi / 2, 0.5, 0.5}}, 0.0,
                                  "diverse_bi_sym"));
  out.push_back(Workload::mixture({{1.0, 0.3, 0.7}, {3.5, 0.7, 0.3}}, 0.0, "diverse_bi_skew"));
  out.push_back(Workload::mixture({{2.0, 0.6, 0.5}, {5.0, 0.4, 0.5}}, 0.0, "diverse_bi_mixed"));
  // Trimodal.
  out.push_back(evenly_spaced(3, 0.35, kPi / 3, "diverse_tri_even"));
  out.push_back(Workload::mixture({{0.5, 0.35, 0.5}, {2.5, 0.35, 0.3}, {4.5, 0.35, 0.2}}, 0.0,
                                  "diverse_tri_skew"));
  out.push_back(Workload::mixture({{1.0, 0.25, 0.4}, {3.0, 0.5, 0.3}, {5.2, 0.8, 0.3}}, 0.0,
                                  "diverse_tri_wide"));
  // Quadmodal.
  out.push_back(evenly_spaced(4, 0.3, kPi / 4, "diverse_quad_even"));
  out.push_back(Workload::mixture(
      {{0.8, 0.3, 0.4}, {2.2, 0.3, 0.2}, {3.8, 0.3, 0.2}, {5.4, 0.3, 0.2}}, 0.0,
      "diverse_quad_skew"));
  out.push_back(Workload::mixture(
      {{0.3, 0.25, 0.25}, {1.9, 0.45, 0.25}, {3.5, 0.25, 0.25}, {5.1, 0.45, 0.25}}, 0.0,
      "diverse_quad_mixed"));
  // Quintmodal.
  out.push_back(evenly_spaced(5, 0.25, kPi / 5, "diverse_quint_even"));
  out.push_back(Workload::mixture({{0.4, 0.25, 0.3},
                                   {1.6, 0.25, 0.25},
                                   {2.8, 0.25, 0.2},
                                   {4.0, 0.25, 0.15},
                                   {5.2, 0.25, 0.1}},
                                  0.0, "diverse_quint_skew"));
  out.push_back(Workload::mixture({{0.2, 0.3, 0.2},
                                   {1.5, 0.2, 0.2},
                                   {2.7, 0.4, 0.2},
                                   {4.1, 0.2, 0.2},
                                   {5.5, 0.3, 0.2}},
                                  0.0, "diverse_quint_mixed"));
  return out;
}

const std::vector<std::string>& catalogue_names() {
  static const std::vector<std::string> names = {"pics8", "pics9", "unimodal16", "diverse16",
                                                 "homosuited16"};
  return names;
}

std::vector<Workload> catalogue_by_name(const std::string& name) {
  if (name == "pics8") return catalogue_pics(8, "pics8");
  if (name == "pics9") return catalogue_pics(9, "pics9");
  if (name == "unimodal16") return catalogue_unimodal16();
  if (name == "diverse16") return catalogue_diverse16();
  if (name == "homosuited16") return catalogue_homosuited16();
  throw std::invalid_argument("unknown catalogue: " + name);
}

std::string workload_to_json(const Workload& w) { return workload_json(w).dump(2); }

std::string catalogue_to_json(const std::vector<Workload>& workloads) {
  json j;
  j["workloads"] = json::array();
  for (const auto& w : workloads) j["workloads"].push_back(workload_json(w));
  return j.dump(2);
}

Workload workload_from_json(const std::string& text) {
  return workload_from(json::parse(text));
}

std::vector<Workload> load_catalogue_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open catalogue file: " + path);
  json j;
  in >> j;
  std::vector<Workload> out;
  for (const auto& w : j.at("workloads")) out.push_back(workload_from(w));
  return out;
}

void save_catalogue_file(const std::vector<Workload>& workloads, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write catalogue file: " + path);
  out << catalogue_to_json(workloads) << "\n";
}

}  // namespace prodsys
