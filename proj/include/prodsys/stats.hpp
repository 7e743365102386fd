#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace prodsys {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int n = 0;
};

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> params;
  double residual = 0.0;   // sum of squared errors at the optimum
  double r_squared = 0.0;
  bool converged = true;   // false flags a degenerate or non-converged fit

  double param(const std::string& name) const;
};

// Regularised incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

double student_t_cdf(double x, double dof);
double f_distribution_cdf(double x, double df1, double df2);
double normal_cdf(double x);

// Sample Pearson correlation; two-sided p from the t transform (n - 2 dof).
TestResult pearson(std::span<const double> x, std::span<const double> y);

// Pearson on mid-ranks (ties receive average ranks).
TestResult spearman(std::span<const double> x, std::span<const double> y);

TestResult paired_t(std::span<const double> x, std::span<const double> y);
TestResult one_sample_t(std::span<const double> d, double mu0);

// W = smaller signed-rank sum; exact enumeration for n <= 20 (after
// dropping zero differences), normal approximation with tie correction
// above.
TestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y);

struct OlsResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double residual = 0.0;  // sum of squared errors
};

OlsResult ols_linear(std::span<const double> x, std::span<const double> y);

// Least-squares coefficients of y on an intercept plus the given regressor
// columns; the intercept is returned first.
std::vector<double> ols_fit(const std::vector<std::vector<double>>& columns,
                            std::span<const double> y);

// Residual sum of squares of the same fit. Used by the nested-regression test.
double ols_sse(const std::vector<std::vector<double>>& columns, std::span<const double> y);

// F = ((SSE_r - SSE_f)/ddf) / (SSE_f/(n - df_f)) with df counted as number
// of fitted parameters per model.
TestResult nested_f_test(double full_sse, double restricted_sse, int df_full, int df_restricted,
                         int n);

struct NelderMeadOptions {
  int max_iterations = 2000;
  double tolerance = 1e-12;
};

// Deterministic downhill simplex; returns the best point found.
std::vector<double> nelder_mead(const std::function<double(std::span<const double>)>& f,
                                std::vector<double> start, double scale,
                                const NelderMeadOptions& options = {});

// h(x) = h_inf / (1 + (x/a)^-gamma), fitted by multi-start simplex with
// positivity enforced through a log-space parametrisation.
FitResult fit_log_logistic(std::span<const double> n_values, std::span<const double> h_values,
                           std::uint64_t seed = 7);

// L = A/N^alpha + B/D^beta + L0 with A, B, alpha, beta > 0 and L0 >= 0.
FitResult fit_chinchilla(std::span<const double> n_values, std::span<const double> d_values,
                         std::span<const double> l_values, std::uint64_t seed = 7);

// One-resource form L = B/D^beta + L0.
FitResult fit_chinchilla_reduced(std::span<const double> d_values,
                                 std::span<const double> l_values, std::uint64_t seed = 7);

}  // namespace prodsys
