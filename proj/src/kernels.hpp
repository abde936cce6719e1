#pragma once
// Flat arithmetic kernels behind the Monte-Carlo evaluation core. Each kernel
// has a scalar reference implementation and an AVX2 variant; the active one
// is selected at runtime from CPU capabilities and can be forced for testing.

#include <cstddef>

namespace bimt::kern {

enum class Backend { kAuto, kScalar, kAvx2 };

// sum_i w[i] * exp(-t * x[i]);  x[i] >= 0, t >= 0
double weighted_exp_sum(const double* w, const double* x, std::size_t n, double t);

// Quadruples packed as 6 doubles each: r12, r34, r13, r24, r14, r23.
// Returns max over quads of  r12 + r34 - max(r13 + r24, r14 + r23),
// i.e. the largest violation of the four-point condition (<= 0 on trees).
double four_point_excess(const double* q, std::size_t n_quads);

void set_backend(Backend b);          // kAuto re-probes the CPU
const char* backend_name();

namespace detail {
double weighted_exp_sum_scalar(const double* w, const double* x, std::size_t n, double t);
double four_point_excess_scalar(const double* q, std::size_t n_quads);
bool avx2_compiled();
bool avx2_available();
double weighted_exp_sum_avx2(const double* w, const double* x, std::size_t n, double t);
double four_point_excess_avx2(const double* q, std::size_t n_quads);
}  // namespace detail

}  // namespace bimt::kern
