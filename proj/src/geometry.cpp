#include "prodsys/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace prodsys {
namespace {

// exp(x) underflows to zero below roughly -745; skipping those terms keeps
// the wrap-sum exact to double precision at a fraction of the cost.
constexpr double kExpUnderflow = -746.0;

int wrap_term_range(double sigma, int truncation) {
  // Terms beyond |x| = sqrt(pi^2 + 84 sigma^2) are below 1e-16 relative to
  // the nearest-image term, which is always within pi of the mean.
  const double reach = std::sqrt(kPi * kPi + 84.0 * sigma * sigma);
  const int needed = 1 + static_cast<int>((reach + kPi) / kTwoPi);
  return needed < truncation ? needed : truncation;
}

int fourier_term_count(double sigma) {
  // Terms decay as exp(-sigma^2 n^2 / 2); stop once below ~1e-18.
  const int n = static_cast<int>(std::ceil(9.1 / sigma)) + 1;
  return n < 2 ? 2 : n;
}

}  // namespace

double wrap_angle(double radians) {
  double r = std::fmod(radians, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double circ_signed(double a, double b) {
  double d = std::fmod(a - b, kTwoPi);
  if (d > kPi) d -= kTwoPi;
  if (d <= -kPi) d += kTwoPi;
  return d;
}

double circ_dist(double a, double b) {
  const double d = std::fabs(wrap_angle(a) - wrap_angle(b));
  return d > kPi ? kTwoPi - d : d;
}

Grid::Grid(int size) {
  if (size <= 0) throw std::invalid_argument("Grid: size must be positive");
  spacing_ = kTwoPi / size;
  nodes_.resize(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) nodes_[static_cast<std::size_t>(i)] = i * spacing_;
}

double integrate(std::span<const double> values, const Grid& grid) {
  if (static_cast<int>(values.size()) != grid.size())
    throw std::invalid_argument("integrate: value count does not match grid");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * grid.spacing();
}

WrappedGaussian::WrappedGaussian(Angle mu_, double sigma_, double sigma_floor) : mu(mu_), sigma(sigma_) {
  if (!(sigma >= sigma_floor))
    throw std::invalid_argument("WrappedGaussian: sigma below the configured floor");
}

double wg_pdf_wrapped(const WrappedGaussian& g, double theta, int truncation) {
  if (truncation < 1) throw std::invalid_argument("wg_pdf_wrapped: truncation must be >= 1");
  const double inv_two_var = 1.0 / (2.0 * g.sigma * g.sigma);
  const double norm = 1.0 / (g.sigma * std::sqrt(kTwoPi));
  const double d0 = circ_signed(theta, g.mu.value());
  const int kr = wrap_term_range(g.sigma, truncation);
  double sum = 0.0;
  for (int k = -kr; k <= kr; ++k) {
    const double x = d0 + kTwoPi * k;
    const double arg = -x * x * inv_two_var;
    if (arg > kExpUnderflow) sum += std::exp(arg);
  }
  return norm * sum;
}

double wg_pdf_fourier(const WrappedGaussian& g, double theta, int max_terms) {
  const int n_max = max_terms > 0 ? max_terms : fourier_term_count(g.sigma);
  const double delta = theta - g.mu.value();
  const double half_var = 0.5 * g.sigma * g.sigma;
  double sum = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    const double arg = -half_var * n * n;
    if (arg <= kExpUnderflow) break;
    sum += 2.0 * std::exp(arg) * std::cos(n * delta);
  }
  return sum / kTwoPi;
}

double wg_pdf(const WrappedGaussian& g, double theta) {
  return g.sigma > 2.0 ? wg_pdf_fourier(g, theta) : wg_pdf_wrapped(g, theta);
}

WgExtrema wg_extrema(const WrappedGaussian& g) {
  WgExtrema e;
  e.max_value = wg_pdf(g, g.mu.value());
  e.min_value = wg_pdf(g, g.mu.value() + kPi);
  return e;
}

void wg_eval_grid(const WrappedGaussian& g, const Grid& grid, std::span<double> pdf,
                  std::span<double> dmu, std::span<double> dsigma) {
  const int L = grid.size();
  if (static_cast<int>(pdf.size()) != L)
    throw std::invalid_argument("wg_eval_grid: pdf span does not match grid");
  const bool want_grad = !dmu.empty() || !dsigma.empty();
  if (want_grad && (static_cast<int>(dmu.size()) != L || static_cast<int>(dsigma.size()) != L))
    throw std::invalid_argument("wg_eval_grid: gradient spans must match grid");

  const double sigma = g.sigma;
  const double mu = g.mu.value();

  if (sigma > 2.0) {
    const int n_max = fourier_term_count(sigma);
    for (int i = 0; i < L; ++i) {
      const double delta = grid.node(i) - mu;
      double s = 1.0, smu = 0.0, ssig = 0.0;
      for (int n = 1; n <= n_max; ++n) {
        const double a = std::exp(-0.5 * sigma * sigma * n * n);
        const double c = std::cos(n * delta);
        s += 2.0 * a * c;
        if (want_grad) {
          smu += 2.0 * a * n * std::sin(n * delta);
          ssig += -2.0 * a * sigma * n * n * c;
        }
      }
      pdf[static_cast<std::size_t>(i)] = s / kTwoPi;
      if (want_grad) {
        dmu[static_cast<std::size_t>(i)] = smu / kTwoPi;
        dsigma[static_cast<std::size_t>(i)] = ssig / kTwoPi;
      }
    }
    return;
  }

  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  const double inv_var = 1.0 / (sigma * sigma);
  const double norm = 1.0 / (sigma * std::sqrt(kTwoPi));
  const int kr = wrap_term_range(sigma, 10);
  for (int i = 0; i < L; ++i) {
    const double d0 = circ_signed(grid.node(i), mu);
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (int k = -kr; k <= kr; ++k) {
      const double x = d0 + kTwoPi * k;
      const double arg = -x * x * inv_two_var;
      if (arg > kExpUnderflow) {
        const double e = std::exp(arg);
        s0 += e;
        s1 += e * x;
        s2 += e * x * x;
      }
    }
    const double p = norm * s0;
    pdf[static_cast<std::size_t>(i)] = p;
    if (want_grad) {
      dmu[static_cast<std::size_t>(i)] = norm * s1 * inv_var;
      dsigma[static_cast<std::size_t>(i)] = norm * s2 * inv_var / sigma - p / sigma;
    }
  }
}

}  // namespace prodsys
