#pragma once
// Offspring distributions on N_0 for Galton-Watson generation, as truncated
// pmf tables with cached cdf. Families are parsed from CLI-facing strings:
// "poisson:1.0", "geometric:0.5", "binary" / "binary:p0=0.5,p2=0.5",
// "stable:alpha=1.5,C=0.5".

#include <string>
#include <vector>

#include "rng.hpp"

namespace bimt {

struct OffspringDistribution {
  std::string name;           // canonical family string
  std::vector<double> pmf;    // pmf[k] = P(offspring = k)
  std::vector<double> cdf;
  double mean = 0.0;
  double variance = 0.0;
  bool critical_or_subcritical = false;  // mean <= 1 (within 1e-12)
  double truncation_mass = 0.0;          // pmf mass cut off before renormalizing

  long sample(Rng& rng) const;
  long max_k() const { return static_cast<long>(pmf.size()) - 1; }

  static OffspringDistribution poisson(double lambda);
  static OffspringDistribution geometric(double p);  // pmf (1-p) p^k, mean p/(1-p)
  static OffspringDistribution binary(double p0, double p2);
  // tail C*k^{-1-alpha} for k >= 2, eta(1) and eta(0) chosen to make the pmf
  // critical (mean 1); requires C * sum_{k>=2} k^{-alpha} <= 1
  static OffspringDistribution heavy_tail(double alpha, double C, long k_max = 1000000);
  static OffspringDistribution from_table(std::vector<double> pmf, std::string name = "table");
  static OffspringDistribution parse(const std::string& spec);
};

}  // namespace bimt
