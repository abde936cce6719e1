// AVX2 variants. Built with -mavx2 -mfma on x86-64; the dispatcher only calls
// in here after a runtime cpuid check. exp is a Cephes-style rational
// approximation (~1-2 ulp); arguments below -708 flush to zero instead of
// producing subnormals, which is inside the equivalence-test tolerance.

#include "kernels.hpp"

#if defined(__AVX2__) && defined(__x86_64__)

#include <immintrin.h>

#include <cmath>

namespace bimt::kern::detail {

bool avx2_compiled() { return true; }

namespace {

const double kExpC1 = 6.93145751953125e-1;
const double kExpC2 = 1.42860682030941723212e-6;
const double kLog2e = 1.4426950408889634073599;
const double kP0 = 1.26177193074810590878e-4;
const double kP1 = 3.02994407707441961300e-2;
const double kP2 = 9.99999999999999999910e-1;
const double kQ0 = 3.00198505138664455042e-6;
const double kQ1 = 2.52448340349684104192e-3;
const double kQ2 = 2.27265548208155028766e-1;
const double kQ3 = 2.00000000000000000005e0;

// exp(x) for x in [-708, 0]
inline __m256d exp_nonpos_pd(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lo);

  __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kExpC1), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kExpC2), r);

  __m256d xx = _mm256_mul_pd(r, r);
  __m256d px = _mm256_fmadd_pd(_mm256_set1_pd(kP0), xx, _mm256_set1_pd(kP1));
  px = _mm256_fmadd_pd(px, xx, _mm256_set1_pd(kP2));
  px = _mm256_mul_pd(px, r);
  __m256d qx = _mm256_fmadd_pd(_mm256_set1_pd(kQ0), xx, _mm256_set1_pd(kQ1));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(kQ2));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(kQ3));
  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

  // 2^n via exponent bits; n in [-1022, 1] here
  __m128i ni = _mm256_cvtpd_epi32(n);
  __m256i nl = _mm256_cvtepi32_epi64(ni);
  __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(nl, _mm256_set1_epi64x(1023)), 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));

  return _mm256_andnot_pd(underflow, e);
}

inline double hsum_pd(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swap = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swap));
}

inline double hmax_pd(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d swap = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, swap));
}

}  // namespace

double weighted_exp_sum_avx2(const double* w, const double* x, std::size_t n, double t) {
  const __m256d mt = _mm256_set1_pd(-t);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d xv = _mm256_loadu_pd(x + i);
    __m256d wv = _mm256_loadu_pd(w + i);
    acc = _mm256_fmadd_pd(wv, exp_nonpos_pd(_mm256_mul_pd(mt, xv)), acc);
  }
  double total = hsum_pd(acc);
  for (; i < n; ++i) total += w[i] * std::exp(-t * x[i]);
  return total;
}

double four_point_excess_avx2(const double* q, std::size_t n_quads) {
  __m256d worst = _mm256_set1_pd(-HUGE_VAL);
  std::size_t i = 0;
  for (; i + 4 <= n_quads; i += 4) {
    const double* b = q + 6 * i;
    __m256d r12 = _mm256_set_pd(b[18], b[12], b[6], b[0]);
    __m256d r34 = _mm256_set_pd(b[19], b[13], b[7], b[1]);
    __m256d r13 = _mm256_set_pd(b[20], b[14], b[8], b[2]);
    __m256d r24 = _mm256_set_pd(b[21], b[15], b[9], b[3]);
    __m256d r14 = _mm256_set_pd(b[22], b[16], b[10], b[4]);
    __m256d r23 = _mm256_set_pd(b[23], b[17], b[11], b[5]);
    __m256d lhs = _mm256_add_pd(r12, r34);
    __m256d rhs = _mm256_max_pd(_mm256_add_pd(r13, r24), _mm256_add_pd(r14, r23));
    worst = _mm256_max_pd(worst, _mm256_sub_pd(lhs, rhs));
  }
  double out = hmax_pd(worst);
  if (i < n_quads) {
    double tail = four_point_excess_scalar(q + 6 * i, n_quads - i);
    out = out > tail ? out : tail;
  }
  return out;
}

}  // namespace bimt::kern::detail

#else  // stub when the AVX2 translation unit cannot be built

namespace bimt::kern::detail {
bool avx2_compiled() { return false; }
double weighted_exp_sum_avx2(const double* w, const double* x, std::size_t n, double t) {
  return weighted_exp_sum_scalar(w, x, n, t);
}
double four_point_excess_avx2(const double* q, std::size_t n_quads) {
  return four_point_excess_scalar(q, n_quads);
}
}  // namespace bimt::kern::detail

#endif
