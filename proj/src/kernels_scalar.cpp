#include <cmath>

#include "kernels.hpp"

namespace bimt::kern::detail {

double weighted_exp_sum_scalar(const double* w, const double* x, std::size_t n, double t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += w[i] * std::exp(-t * x[i]);
  return acc;
}

double four_point_excess_scalar(const double* q, std::size_t n_quads) {
  double worst = -HUGE_VAL;
  for (std::size_t i = 0; i < n_quads; ++i) {
    const double* r = q + 6 * i;
    double lhs = r[0] + r[1];
    double rhs = std::fmax(r[2] + r[3], r[4] + r[5]);
    worst = std::fmax(worst, lhs - rhs);
  }
  return worst;
}

}  // namespace bimt::kern::detail
