#pragma once

#include <span>
#include <vector>

namespace prodsys {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.1415926535897932384626433832795;

// Default lower bound on skill breadths; keeps every density bounded away
// from a point mass.
inline constexpr double kSigmaFloor = 0.05;

// Reduces an angle into [0, 2*pi).
double wrap_angle(double radians);

// Signed circular difference a - b, wrapped into (-pi, pi].
double circ_signed(double a, double b);

// Circular distance min(|a-b|, 2*pi - |a-b|), always in [0, pi].
double circ_dist(double a, double b);

class Angle {
 public:
  Angle() = default;
  explicit Angle(double radians) : value_(wrap_angle(radians)) {}

  double value() const { return value_; }

 private:
  double value_ = 0.0;
};

inline double circ_dist(Angle a, Angle b) { return circ_dist(a.value(), b.value()); }
inline double circ_dist(Angle a, double b) { return circ_dist(a.value(), b); }
inline double circ_dist(double a, Angle b) { return circ_dist(a, b.value()); }

// Uniform grid of L nodes on the circle, starting at 0 with spacing 2*pi/L.
class Grid {
 public:
  explicit Grid(int size);

  int size() const { return static_cast<int>(nodes_.size()); }
  double spacing() const { return spacing_; }
  double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& nodes() const { return nodes_; }

 private:
  std::vector<double> nodes_;
  double spacing_ = 0.0;
};

// Trapezoidal quadrature on a periodic uniform grid (endpoints identified).
double integrate(std::span<const double> values, const Grid& grid);

struct WrappedGaussian {
  Angle mu;
  double sigma = 1.0;

  WrappedGaussian() = default;
  WrappedGaussian(Angle mu_, double sigma_, double sigma_floor = kSigmaFloor);
};

// Wrap-sum evaluation with terms k in [-truncation, truncation].
double wg_pdf_wrapped(const WrappedGaussian& g, double theta, int truncation = 10);

// Fourier-series evaluation; max_terms <= 0 picks the truncation from sigma
// so the neglected tail stays below machine precision.
double wg_pdf_fourier(const WrappedGaussian& g, double theta, int max_terms = 0);

// Density value; dispatches to the representation that converges fastest
// (wrap-sum for sigma <= 2, Fourier otherwise).
double wg_pdf(const WrappedGaussian& g, double theta);

struct WgExtrema {
  double max_value = 0.0;  // attained at theta = mu
  double min_value = 0.0;  // attained at theta = mu + pi
};

WgExtrema wg_extrema(const WrappedGaussian& g);

// Density and its partial derivatives w.r.t. mu and sigma at every grid
// node. Output spans must have grid.size() elements; dmu/dsigma may be
// empty when gradients are not needed.
void wg_eval_grid(const WrappedGaussian& g, const Grid& grid, std::span<double> pdf,
                  std::span<double> dmu = {}, std::span<double> dsigma = {});

}  // namespace prodsys
