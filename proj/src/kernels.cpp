#include "kernels.hpp"

#include <atomic>

namespace bimt::kern {

namespace detail {

bool avx2_available() {
#if defined(__x86_64__)
  return avx2_compiled() && __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

}  // namespace detail

namespace {

std::atomic<int> g_backend{-1};  // -1 unresolved, 0 scalar, 1 avx2

int resolve() {
  int b = g_backend.load(std::memory_order_relaxed);
  if (b >= 0) return b;
  b = detail::avx2_available() ? 1 : 0;
  g_backend.store(b, std::memory_order_relaxed);
  return b;
}

}  // namespace

void set_backend(Backend b) {
  switch (b) {
    case Backend::kAuto:
      g_backend.store(detail::avx2_available() ? 1 : 0, std::memory_order_relaxed);
      break;
    case Backend::kScalar:
      g_backend.store(0, std::memory_order_relaxed);
      break;
    case Backend::kAvx2:
      g_backend.store(detail::avx2_available() ? 1 : 0, std::memory_order_relaxed);
      break;
  }
}

const char* backend_name() { return resolve() == 1 ? "avx2" : "scalar"; }

double weighted_exp_sum(const double* w, const double* x, std::size_t n, double t) {
  return resolve() == 1 ? detail::weighted_exp_sum_avx2(w, x, n, t)
                        : detail::weighted_exp_sum_scalar(w, x, n, t);
}

double four_point_excess(const double* q, std::size_t n_quads) {
  return resolve() == 1 ? detail::four_point_excess_avx2(q, n_quads)
                        : detail::four_point_excess_scalar(q, n_quads);
}

}  // namespace bimt::kern
