#include "prodsys/features.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace prodsys {

std::array<double, 12> FeatureVector::values() const {
  return {peaks_number, spread,    shannon_entropy, renyi2,      fourier_1, fourier_2,
          fourier_3,    fourier_conc, h_low,        peak_height, flatness,  circular_variance};
}

std::vector<double> normalise_workload(const Workload& w, const Grid& grid) {
  std::vector<double> values = workload_eval(w, grid);
  double mass = 0.0;
  for (double v : values) {
    if (v < 0.0) throw std::invalid_argument("normalise_workload: negative density");
    mass += v;
  }
  mass *= grid.spacing();
  if (mass <= 0.0) throw std::invalid_argument("normalise_workload: zero workload");
  for (auto& v : values) v /= mass;
  return values;
}

FeatureVector feature_vector(const Workload& w, const Grid& grid) {
  const int L = grid.size();
  const double dtheta = grid.spacing();
  const std::vector<double> raw = workload_eval(w, grid);
  const std::vector<double> norm = normalise_workload(w, grid);

  FeatureVector f;

  if (w.kind == Workload::Kind::tabulated) {
    f.peaks_number = std::numeric_limits<double>::quiet_NaN();
    f.spread = std::numeric_limits<double>::quiet_NaN();
  } else if (w.kind == Workload::Kind::uniform) {
    f.peaks_number = 0.0;
    f.spread = 0.0;
  } else {
    f.peaks_number = static_cast<double>(w.components.size());
    double s_max = 0.0;
    for (std::size_t i = 0; i < w.components.size(); ++i)
      for (std::size_t j = i + 1; j < w.components.size(); ++j)
        s_max = std::max(s_max, circ_dist(w.components[i].center, w.components[j].center));
    f.spread = s_max;
  }

  for (int i = 0; i < L; ++i) {
    const double v = norm[static_cast<std::size_t>(i)];
    if (v > 0.0) f.shannon_entropy -= v * std::log(v) * dtheta;
    f.renyi2 += v * v * dtheta;
  }
  f.renyi2 = -std::log(f.renyi2);

  // Spectral fractions of the mean-centred raw profile. The total power
  // over all non-zero modes comes from Parseval on the centred samples.
  double mean = 0.0;
  for (double v : raw) mean += v;
  mean /= L;
  double total_power = 0.0;
  for (double v : raw) total_power += (v - mean) * (v - mean);
  total_power /= L;  // = sum over k != 0 of |c_k|^2
  // Guard against pure rounding noise on constant profiles (0/0 -> 0).
  const double power_floor = 1e-24 * mean * mean + 1e-300;
  if (total_power > power_floor) {
    for (int k = 1; k <= 3; ++k) {
      std::complex<double> c(0.0, 0.0);
      for (int i = 0; i < L; ++i) {
        const double phase = -kTwoPi * k * i / L;
        c += (raw[static_cast<std::size_t>(i)] - mean) *
             std::complex<double>(std::cos(phase), std::sin(phase));
      }
      c /= static_cast<double>(L);
      const double frac = 2.0 * std::norm(c) / total_power;
      if (k == 1) f.fourier_1 = frac;
      if (k == 2) f.fourier_2 = frac;
      if (k == 3) f.fourier_3 = frac;
    }
  }
  f.fourier_conc = f.fourier_1 + f.fourier_2 + f.fourier_3;

  // Kernel-based inverse concentration: 1 / ((dtheta)^2 W^T Z W) with
  // Z(t, t') = exp(-d(t, t')/pi). The kernel is circulant, so one row
  // suffices.
  std::vector<double> kernel(static_cast<std::size_t>(L));
  for (int m = 0; m < L; ++m)
    kernel[static_cast<std::size_t>(m)] = std::exp(-circ_dist(grid.node(m), 0.0) / kPi);
  double quad = 0.0;
  for (int m = 0; m < L; ++m) {
    double corr = 0.0;
    for (int i = 0; i < L; ++i)
      corr += norm[static_cast<std::size_t>(i)] * norm[static_cast<std::size_t>((i + m) % L)];
    quad += kernel[static_cast<std::size_t>(m)] * corr;
  }
  f.h_low = 1.0 / (dtheta * dtheta * quad);

  f.peak_height = 0.0;
  for (double v : raw) f.peak_height = std::max(f.peak_height, v);

  double m2 = 0.0, m4 = 0.0;
  for (double v : raw) {
    const double d = v - mean;
    m2 += d * d * dtheta;
    m4 += d * d * d * d * dtheta;
  }
  f.flatness = m2 > kTwoPi * power_floor ? m4 / (m2 * m2) : 0.0;

  double re = 0.0, im = 0.0;
  for (int i = 0; i < L; ++i) {
    re += norm[static_cast<std::size_t>(i)] * std::cos(grid.node(i)) * dtheta;
    im += norm[static_cast<std::size_t>(i)] * std::sin(grid.node(i)) * dtheta;
  }
  f.circular_variance = 1.0 - std::sqrt(re * re + im * im);

  return f;
}

}  // namespace prodsys
