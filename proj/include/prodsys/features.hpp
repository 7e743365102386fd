#pragma once

#include <array>
#include <vector>

#include "prodsys/model.hpp"

namespace prodsys {

// The 12 workload shape features, evaluated on a 2048-node grid in the
// correlation study. peaks_number and spread are NaN for tabulated
// workloads (no parametric peak centres).
struct FeatureVector {
  double peaks_number = 0.0;
  double spread = 0.0;
  double shannon_entropy = 0.0;
  double renyi2 = 0.0;
  double fourier_1 = 0.0;
  double fourier_2 = 0.0;
  double fourier_3 = 0.0;
  double fourier_conc = 0.0;
  double h_low = 0.0;
  double peak_height = 0.0;
  double flatness = 0.0;
  double circular_variance = 0.0;

  std::array<double, 12> values() const;
};

inline constexpr std::array<const char*, 12> kFeatureNames = {
    "peaks_number", "spread",    "shannon_entropy", "renyi2",
    "fourier_1",    "fourier_2", "fourier_3",       "fourier_conc",
    "h_low",        "peak_height", "flatness",      "circular_variance"};

// W0 scaled to unit mass under the grid quadrature.
std::vector<double> normalise_workload(const Workload& w, const Grid& grid);

FeatureVector feature_vector(const Workload& w, const Grid& grid);

}  // namespace prodsys
