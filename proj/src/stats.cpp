#include "prodsys/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "prodsys/rng.hpp"

namespace prodsys {
namespace {

constexpr double kTiny = 1e-300;

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-12) break;
  }
  return h;
}

std::vector<double> midranks(std::span<const double> values) {
  const int n = static_cast<int>(values.size());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return values[static_cast<std::size_t>(i)] < values[static_cast<std::size_t>(j)]; });
  std::vector<double> ranks(static_cast<std::size_t>(n));
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && values[static_cast<std::size_t>(order[static_cast<std::size_t>(j + 1)])] ==
                            values[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])])
      ++j;
    const double rank = 0.5 * (i + j) + 1.0;  // average of 1-based positions
    for (int k = i; k <= j; ++k) ranks[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = rank;
    i = j + 1;
  }
  return ranks;
}

TestResult correlation_from_samples(std::span<const double> x, std::span<const double> y) {
  const int n = static_cast<int>(x.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[static_cast<std::size_t>(i)];
    my += y[static_cast<std::size_t>(i)];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = x[static_cast<std::size_t>(i)] - mx;
    const double dy = y[static_cast<std::size_t>(i)] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::invalid_argument("correlation: constant input");
  TestResult r;
  r.n = n;
  r.statistic = sxy / std::sqrt(sxx * syy);
  r.statistic = std::clamp(r.statistic, -1.0, 1.0);
  const double r2 = r.statistic * r.statistic;
  if (r2 >= 1.0) {
    r.p_value = 0.0;
  } else {
    const double t = r.statistic * std::sqrt((n - 2) / (1.0 - r2));
    r.p_value = 2.0 * (1.0 - student_t_cdf(std::fabs(t), n - 2));
  }
  return r;
}

}  // namespace

double FitResult::param(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return params[i];
  throw std::invalid_argument("FitResult: unknown parameter " + name);
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front =
      std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
               b * std::log(1.0 - x));
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                        b * std::log(1.0 - x) + a * std::log(x)) *
                   beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double x, double dof) {
  if (dof <= 0.0) throw std::invalid_argument("student_t_cdf: dof must be positive");
  if (x == 0.0) return 0.5;
  const double p = incomplete_beta(0.5 * dof, 0.5, dof / (dof + x * x));
  return x > 0.0 ? 1.0 - 0.5 * p : 0.5 * p;
}

double f_distribution_cdf(double x, double df1, double df2) {
  if (df1 <= 0.0 || df2 <= 0.0) throw std::invalid_argument("f_distribution_cdf: invalid dof");
  if (x <= 0.0) return 0.0;
  return incomplete_beta(0.5 * df1, 0.5 * df2, df1 * x / (df1 * x + df2));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

TestResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: size mismatch");
  if (x.size() < 3) throw std::invalid_argument("pearson: need at least 3 samples");
  return correlation_from_samples(x, y);
}

TestResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: size mismatch");
  if (x.size() < 3) throw std::invalid_argument("spearman: need at least 3 samples");
  const std::vector<double> rx = midranks(x);
  const std::vector<double> ry = midranks(y);
  return correlation_from_samples(rx, ry);
}

TestResult one_sample_t(std::span<const double> d, double mu0) {
  const int n = static_cast<int>(d.size());
  if (n < 2) throw std::invalid_argument("one_sample_t: need at least 2 samples");
  double mean = 0.0;
  for (double v : d) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1));
  if (sd == 0.0) throw std::invalid_argument("one_sample_t: zero variance");
  TestResult r;
  r.n = n;
  r.statistic = (mean - mu0) / (sd / std::sqrt(static_cast<double>(n)));
  r.p_value = 2.0 * (1.0 - student_t_cdf(std::fabs(r.statistic), n - 1));
  return r;
}

TestResult paired_t(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("paired_t: size mismatch");
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  return one_sample_t(d, 0.0);
}

TestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("wilcoxon: size mismatch");
  std::vector<double> d;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i] - y[i];
    if (v != 0.0) d.push_back(v);
  }
  const int n = static_cast<int>(d.size());
  if (n < 5) throw std::invalid_argument("wilcoxon: need at least 5 nonzero differences");

  std::vector<double> abs_d(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) abs_d[i] = std::fabs(d[i]);
  const std::vector<double> ranks = midranks(abs_d);

  double w_plus = 0.0, w_minus = 0.0;
  for (int i = 0; i < n; ++i) {
    if (d[static_cast<std::size_t>(i)] > 0.0)
      w_plus += ranks[static_cast<std::size_t>(i)];
    else
      w_minus += ranks[static_cast<std::size_t>(i)];
  }
  TestResult r;
  r.n = n;
  r.statistic = std::min(w_plus, w_minus);

  if (n <= 20) {
    // Exact null distribution of 2*W+ by convolution over the doubled
    // (integer) mid-ranks.
    std::vector<int> r2(static_cast<std::size_t>(n));
    int total = 0;
    for (int i = 0; i < n; ++i) {
      r2[static_cast<std::size_t>(i)] = static_cast<int>(std::lround(2.0 * ranks[static_cast<std::size_t>(i)]));
      total += r2[static_cast<std::size_t>(i)];
    }
    std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
    count[0] = 1.0;
    int reach = 0;
    for (int i = 0; i < n; ++i) {
      reach += r2[static_cast<std::size_t>(i)];
      for (int s = reach; s >= r2[static_cast<std::size_t>(i)]; --s)
        count[static_cast<std::size_t>(s)] += count[static_cast<std::size_t>(s - r2[static_cast<std::size_t>(i)])];
    }
    const int w2 = static_cast<int>(std::lround(2.0 * r.statistic));
    double below = 0.0;
    for (int s = 0; s <= w2 && s <= total; ++s) below += count[static_cast<std::size_t>(s)];
    r.p_value = std::min(1.0, 2.0 * below / std::pow(2.0, n));
  } else {
    const double mean = n * (n + 1) / 4.0;
    double tie_term = 0.0;
    int i = 0;
    std::vector<double> sorted = abs_d;
    std::sort(sorted.begin(), sorted.end());
    while (i < n) {
      int j = i;
      while (j + 1 < n && sorted[static_cast<std::size_t>(j + 1)] == sorted[static_cast<std::size_t>(i)]) ++j;
      const double t = j - i + 1;
      tie_term += t * t * t - t;
      i = j + 1;
    }
    const double var = n * (n + 1) * (2.0 * n + 1) / 24.0 - tie_term / 48.0;
    const double z = (r.statistic - mean) / std::sqrt(var);
    r.p_value = std::min(1.0, 2.0 * normal_cdf(z));
  }
  return r;
}

OlsResult ols_linear(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("ols_linear: size mismatch");
  const int n = static_cast<int>(x.size());
  if (n < 2) throw std::invalid_argument("ols_linear: need at least 2 samples");
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[static_cast<std::size_t>(i)];
    my += y[static_cast<std::size_t>(i)];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = x[static_cast<std::size_t>(i)] - mx;
    const double dy = y[static_cast<std::size_t>(i)] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("ols_linear: degenerate x");
  OlsResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  for (int i = 0; i < n; ++i) {
    const double e = y[static_cast<std::size_t>(i)] - (r.intercept + r.slope * x[static_cast<std::size_t>(i)]);
    r.residual += e * e;
  }
  r.r_squared = syy == 0.0 ? 1.0 : 1.0 - r.residual / syy;
  return r;
}

std::vector<double> ols_fit(const std::vector<std::vector<double>>& columns,
                            std::span<const double> y) {
  const int n = static_cast<int>(y.size());
  const int k = static_cast<int>(columns.size()) + 1;  // regressors + intercept
  for (const auto& c : columns)
    if (static_cast<int>(c.size()) != n) throw std::invalid_argument("ols_fit: column size mismatch");
  if (n <= k) throw std::invalid_argument("ols_fit: not enough rows");

  auto col = [&](int j, int i) {
    return j == 0 ? 1.0 : columns[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i)];
  };
  // Normal equations, solved by Gaussian elimination with partial pivoting.
  std::vector<double> a(static_cast<std::size_t>(k) * k, 0.0);
  std::vector<double> b(static_cast<std::size_t>(k), 0.0);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += col(r, i) * col(c, i);
      a[static_cast<std::size_t>(r * k + c)] = s;
    }
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += col(r, i) * y[static_cast<std::size_t>(i)];
    b[static_cast<std::size_t>(r)] = s;
  }
  for (int c = 0; c < k; ++c) {
    int pivot = c;
    for (int r = c + 1; r < k; ++r)
      if (std::fabs(a[static_cast<std::size_t>(r * k + c)]) > std::fabs(a[static_cast<std::size_t>(pivot * k + c)]))
        pivot = r;
    if (std::fabs(a[static_cast<std::size_t>(pivot * k + c)]) < 1e-12)
      throw std::invalid_argument("ols_fit: singular design");
    if (pivot != c) {
      for (int j = 0; j < k; ++j)
        std::swap(a[static_cast<std::size_t>(c * k + j)], a[static_cast<std::size_t>(pivot * k + j)]);
      std::swap(b[static_cast<std::size_t>(c)], b[static_cast<std::size_t>(pivot)]);
    }
    for (int r = c + 1; r < k; ++r) {
      const double m = a[static_cast<std::size_t>(r * k + c)] / a[static_cast<std::size_t>(c * k + c)];
      for (int j = c; j < k; ++j)
        a[static_cast<std::size_t>(r * k + j)] -= m * a[static_cast<std::size_t>(c * k + j)];
      b[static_cast<std::size_t>(r)] -= m * b[static_cast<std::size_t>(c)];
    }
  }
  std::vector<double> beta(static_cast<std::size_t>(k));
  for (int r = k - 1; r >= 0; --r) {
    double s = b[static_cast<std::size_t>(r)];
    for (int j = r + 1; j < k; ++j) s -= a[static_cast<std::size_t>(r * k + j)] * beta[static_cast<std::size_t>(j)];
    beta[static_cast<std::size_t>(r)] = s / a[static_cast<std::size_t>(r * k + r)];
  }
  return beta;
}

double ols_sse(const std::vector<std::vector<double>>& columns, std::span<const double> y) {
  const std::vector<double> beta = ols_fit(columns, y);
  const int n = static_cast<int>(y.size());
  const int k = static_cast<int>(beta.size());
  double sse = 0.0;
  for (int i = 0; i < n; ++i) {
    double pred = beta[0];
    for (int j = 1; j < k; ++j)
      pred += beta[static_cast<std::size_t>(j)] * columns[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i)];
    const double e = y[static_cast<std::size_t>(i)] - pred;
    sse += e * e;
  }
  return sse;
}

TestResult nested_f_test(double full_sse, double restricted_sse, int df_full, int df_restricted,
                         int n) {
  const int ddf = df_full - df_restricted;
  if (ddf <= 0) throw std::invalid_argument("nested_f_test: full model must add parameters");
  if (n - df_full <= 0) throw std::invalid_argument("nested_f_test: not enough observations");
  if (full_sse > restricted_sse + 1e-12 * std::max(1.0, restricted_sse))
    throw std::invalid_argument("nested_f_test: full SSE exceeds restricted SSE");
  TestResult r;
  r.n = n;
  if (restricted_sse <= full_sse) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    return r;
  }
  if (full_sse <= 0.0) {
    r.statistic = std::numeric_limits<double>::infinity();
    r.p_value = 0.0;
    return r;
  }
  r.statistic = ((restricted_sse - full_sse) / ddf) / (full_sse / (n - df_full));
  r.p_value = 1.0 - f_distribution_cdf(r.statistic, ddf, n - df_full);
  return r;
}

std::vector<double> nelder_mead(const std::function<double(std::span<const double>)>& f,
                                std::vector<double> start, double scale,
                                const NelderMeadOptions& options) {
  const int dim = static_cast<int>(start.size());
  std::vector<std::vector<double>> simplex(static_cast<std::size_t>(dim) + 1, start);
  for (int i = 0; i < dim; ++i) simplex[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(i)] += scale;
  std::vector<double> values(static_cast<std::size_t>(dim) + 1);
  for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = f(simplex[i]);

  std::vector<double> centroid(static_cast<std::size_t>(dim));
  std::vector<double> candidate(static_cast<std::size_t>(dim));
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    std::vector<int> order(simplex.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (values[static_cast<std::size_t>(a)] != values[static_cast<std::size_t>(b)])
        return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)];
      return a < b;
    });
    const int best = order.front();
    const int worst = order.back();
    const int second_worst = order[order.size() - 2];
    if (std::fabs(values[static_cast<std::size_t>(worst)] - values[static_cast<std::size_t>(best)]) <=
        options.tolerance * (std::fabs(values[static_cast<std::size_t>(best)]) + options.tolerance))
      break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (int idx : order)
      if (idx != worst)
        for (int d = 0; d < dim; ++d)
          centroid[static_cast<std::size_t>(d)] += simplex[static_cast<std::size_t>(idx)][static_cast<std::size_t>(d)] / dim;

    auto blend = [&](double coef) {
      for (int d = 0; d < dim; ++d)
        candidate[static_cast<std::size_t>(d)] =
            centroid[static_cast<std::size_t>(d)] +
            coef * (simplex[static_cast<std::size_t>(worst)][static_cast<std::size_t>(d)] - centroid[static_cast<std::size_t>(d)]);
      return f(candidate);
    };

    const double reflected = blend(-1.0);
    if (reflected < values[static_cast<std::size_t>(best)]) {
      const std::vector<double> refl_point = candidate;
      const double expanded = blend(-2.0);
      if (expanded < reflected) {
        simplex[static_cast<std::size_t>(worst)] = candidate;
        values[static_cast<std::size_t>(worst)] = expanded;
      } else {
        simplex[static_cast<std::size_t>(worst)] = refl_point;
        values[static_cast<std::size_t>(worst)] = reflected;
      }
    } else if (reflected < values[static_cast<std::size_t>(second_worst)]) {
      simplex[static_cast<std::size_t>(worst)] = candidate;
      values[static_cast<std::size_t>(worst)] = reflected;
    } else {
      const double contracted = blend(0.5);
      if (contracted < values[static_cast<std::size_t>(worst)]) {
        simplex[static_cast<std::size_t>(worst)] = candidate;
        values[static_cast<std::size_t>(worst)] = contracted;
      } else {
        for (std::size_t i = 0; i < simplex.size(); ++i) {
          if (static_cast<int>(i) == best) continue;
          for (int d = 0; d < dim; ++d)
            simplex[i][static_cast<std::size_t>(d)] =
                0.5 * (simplex[i][static_cast<std::size_t>(d)] +
                       simplex[static_cast<std::size_t>(best)][static_cast<std::size_t>(d)]);
          values[i] = f(simplex[i]);
        }
      }
    }
  }
  const auto best_it = std::min_element(values.begin(), values.end());
  return simplex[static_cast<std::size_t>(best_it - values.begin())];
}

namespace {

// Latin-hypercube starting points, one stratum per start and dimension.
std::vector<std::vector<double>> lhs_starts(int n_starts, const std::vector<double>& lo,
                                            const std::vector<double>& hi, std::uint64_t seed) {
  const int dim = static_cast<int>(lo.size());
  Rng rng(seed);
  std::vector<std::vector<int>> perms(static_cast<std::size_t>(dim));
  for (int d = 0; d < dim; ++d) {
    std::vector<int> p(static_cast<std::size_t>(n_starts));
    std::iota(p.begin(), p.end(), 0);
    for (int i = n_starts - 1; i > 0; --i)
      std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(rng.uniform_int(i + 1))]);
    perms[static_cast<std::size_t>(d)] = std::move(p);
  }
  std::vector<std::vector<double>> starts(static_cast<std::size_t>(n_starts),
                                          std::vector<double>(static_cast<std::size_t>(dim)));
  for (int s = 0; s < n_starts; ++s)
    for (int d = 0; d < dim; ++d) {
      const double u = (perms[static_cast<std::size_t>(d)][static_cast<std::size_t>(s)] + rng.u01()) / n_starts;
      starts[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)] =
          lo[static_cast<std::size_t>(d)] + u * (hi[static_cast<std::size_t>(d)] - lo[static_cast<std::size_t>(d)]);
    }
  return starts;
}

FitResult multi_start_fit(const std::function<double(std::span<const double>)>& sse,
                          const std::function<std::vector<double>(std::span<const double>)>& decode,
                          const std::vector<double>& lo, const std::vector<double>& hi,
                          std::vector<std::string> names, double sst, std::uint64_t seed) {
  const auto starts = lhs_starts(32, lo, hi, seed);
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> best_point;
  for (const auto& s : starts) {
    const std::vector<double> point = nelder_mead(sse, s, 0.5);
    const double v = sse(point);
    if (v < best_value) {
      best_value = v;
      best_point = point;
    }
  }
  FitResult fit;
  fit.names = std::move(names);
  fit.params = decode(best_point);
  fit.residual = best_value;
  fit.r_squared = sst > 0.0 ? 1.0 - best_value / sst : 1.0;
  fit.converged = std::isfinite(best_value);
  return fit;
}

double total_sum_squares(std::span<const double> y) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double sst = 0.0;
  for (double v : y) sst += (v - mean) * (v - mean);
  return sst;
}

}  // namespace

FitResult fit_log_logistic(std::span<const double> n_values, std::span<const double> h_values,
                           std::uint64_t seed) {
  if (n_values.size() != h_values.size()) throw std::invalid_argument("fit_log_logistic: size mismatch");
  if (n_values.size() < 4) throw std::invalid_argument("fit_log_logistic: need at least 4 points");
  double n_min = std::numeric_limits<double>::infinity(), n_max = 0.0, h_max = 0.0;
  for (double v : n_values) {
    if (v <= 0.0) throw std::invalid_argument("fit_log_logistic: n values must be positive");
    n_min = std::min(n_min, v);
    n_max = std::max(n_max, v);
  }
  for (double v : h_values) h_max = std::max(h_max, v);

  const double sst = total_sum_squares(h_values);
  if (h_max <= 0.0 || sst == 0.0) {
    FitResult flat;
    flat.names = {"H_inf", "a", "gamma"};
    flat.params = {std::max(h_max, 0.0), 0.5 * (n_min + n_max), 1.0};
    flat.converged = false;
    return flat;
  }

  auto sse = [&](std::span<const double> z) {
    const double h_inf = std::exp(z[0]);
    const double a = std::exp(z[1]);
    const double gamma = std::exp(z[2]);
    double s = 0.0;
    for (std::size_t i = 0; i < n_values.size(); ++i) {
      const double pred = h_inf / (1.0 + std::pow(n_values[i] / a, -gamma));
      const double e = h_values[i] - pred;
      s += e * e;
    }
    return std::isfinite(s) ? s : 1e100;
  };
  auto decode = [](std::span<const double> z) {
    return std::vector<double>{std::exp(z[0]), std::exp(z[1]), std::exp(z[2])};
  };
  const std::vector<double> lo = {std::log(0.2 * h_max), std::log(0.25 * n_min), std::log(0.2)};
  const std::vector<double> hi = {std::log(4.0 * h_max), std::log(4.0 * n_max), std::log(8.0)};
  return multi_start_fit(sse, decode, lo, hi, {"H_inf", "a", "gamma"}, sst, seed);
}

FitResult fit_chinchilla(std::span<const double> n_values, std::span<const double> d_values,
                         std::span<const double> l_values, std::uint64_t seed) {
  const std::size_t n = l_values.size();
  if (n_values.size() != n || d_values.size() != n)
    throw std::invalid_argument("fit_chinchilla: size mismatch");
  if (n < 6) throw std::invalid_argument("fit_chinchilla: need at least 6 points");
  auto distinct = [](std::span<const double> v) {
    std::vector<double> u(v.begin(), v.end());
    std::sort(u.begin(), u.end());
    return std::unique(u.begin(), u.end()) - u.begin();
  };
  if (distinct(n_values) < 2 || distinct(d_values) < 2)
    throw std::invalid_argument("fit_chinchilla: data must span both axes");

  double l_min = std::numeric_limits<double>::infinity(), l_max = 0.0;
  for (double v : l_values) {
    l_min = std::min(l_min, v);
    l_max = std::max(l_max, v);
  }
  const double scale = std::max(l_max, 1e-6);
  const double sst = total_sum_squares(l_values);

  auto sse = [&](std::span<const double> z) {
    const double a_coef = std::exp(z[0]);
    const double alpha = std::exp(z[1]);
    const double b_coef = std::exp(z[2]);
    const double beta = std::exp(z[3]);
    const double l0 = z[4] * z[4];
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double pred =
          a_coef / std::pow(n_values[i], alpha) + b_coef / std::pow(d_values[i], beta) + l0;
      const double e = l_values[i] - pred;
      s += e * e;
    }
    return std::isfinite(s) ? s : 1e100;
  };
  auto decode = [](std::span<const double> z) {
    return std::vector<double>{std::exp(z[0]), std::exp(z[2]), z[4] * z[4], std::exp(z[1]),
                               std::exp(z[3])};
  };
  const std::vector<double> lo = {std::log(1e-3 * scale), std::log(0.05), std::log(1e-3 * scale),
                                  std::log(0.05), 0.0};
  const std::vector<double> hi = {std::log(20.0 * scale), std::log(3.0), std::log(20.0 * scale),
                                  std::log(3.0), std::sqrt(std::max(l_min, 1e-12))};
  return multi_start_fit(sse, decode, lo, hi, {"A", "B", "L0", "alpha", "beta"}, sst, seed);
}

FitResult fit_chinchilla_reduced(std::span<const double> d_values, std::span<const double> l_values,
                                 std::uint64_t seed) {
  const std::size_t n = l_values.size();
  if (d_values.size() != n) throw std::invalid_argument("fit_chinchilla_reduced: size mismatch");
  if (n < 4) throw std::invalid_argument("fit_chinchilla_reduced: need at least 4 points");
  double l_min = std::numeric_limits<double>::infinity(), l_max = 0.0;
  for (double v : l_values) {
    l_min = std::min(l_min, v);
    l_max = std::max(l_max, v);
  }
  const double scale = std::max(l_max, 1e-6);
  const double sst = total_sum_squares(l_values);

  auto sse = [&](std::span<const double> z) {
    const double b_coef = std::exp(z[0]);
    const double beta = std::exp(z[1]);
    const double l0 = z[2] * z[2];
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double pred = b_coef / std::pow(d_values[i], beta) + l0;
      const double e = l_values[i] - pred;
      s += e * e;
    }
    return std::isfinite(s) ? s : 1e100;
  };
  auto decode = [](std::span<const double> z) {
    return std::vector<double>{std::exp(z[0]), z[2] * z[2], std::exp(z[1])};
  };
  const std::vector<double> lo = {std::log(1e-3 * scale), std::log(0.05), 0.0};
  const std::vector<double> hi = {std::log(20.0 * scale), std::log(3.0),
                                  std::sqrt(std::max(l_min, 1e-12))};
  return multi_start_fit(sse, decode, lo, hi, {"B", "L0", "beta"}, sst, seed);
}

}  // namespace prodsys
