#pragma once
// Small statistics utilities used by tests, the acceptance suite and the CLI
// reports: sample moments, two-sample Kolmogorov-Smirnov, chi-square.

#include <span>
#include <vector>

namespace bimt {

struct MeanStderr {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
  long n = 0;
};

MeanStderr mean_stderr(std::span<const double> xs);

// two-sample Kolmogorov-Smirnov statistic and asymptotic p-value
double ks_statistic(std::vector<double> a, std::vector<double> b);
double ks_two_sample_p(std::vector<double> a, std::vector<double> b);

// upper regularized incomplete gamma Q(a, x)
double gamma_q(double a, double x);
// p-value of a chi-square statistic with df degrees of freedom
double chi_square_p(double stat, int df);

// Pearson chi-square of observed counts against expected probabilities;
// returns the p-value. Cells with tiny expectation are pooled.
double chi_square_gof_p(std::span<const long> observed, std::span<const double> expected_prob);

// two-sample homogeneity chi-square on count vectors over the same cells
double chi_square_homogeneity_p(std::span<const long> a, std::span<const long> b);

// least-squares slope of y against x
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace bimt
