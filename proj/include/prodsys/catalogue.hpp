#pragma once

#include <string>
#include <vector>

#include "prodsys/model.hpp"

namespace prodsys {

// Built-in workload families used across the experiments:
//   pics8 / pics9    - 1..8 (or 9) evenly spaced peaks, sigma 0.25, unit mass
//   unimodal16       - single peaks at equally spaced angles, breadths 0.3..2.0
//   diverse16        - uniform through quintmodal mixtures
//   homosuited16     - single peaks all centred at pi, breadths 0.3..2.0
std::vector<Workload> catalogue_pics(int max_peaks, const std::string& prefix);
std::vector<Workload> catalogue_unimodal16();
std::vector<Workload> catalogue_diverse16();
std::vector<Workload> catalogue_homosuited16();

const std::vector<std::string>& catalogue_names();
std::vector<Workload> catalogue_by_name(const std::string& name);

std::string workload_to_json(const Workload& w);
std::string catalogue_to_json(const std::vector<Workload>& workloads);

Workload workload_from_json(const std::string& text);
std::vector<Workload> load_catalogue_file(const std::string& path);
void save_catalogue_file(const std::vector<Workload>& workloads, const std::string& path);

}  // namespace prodsys
