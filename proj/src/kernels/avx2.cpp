// Compiled with -mavx2 -mfma. Only reached through avx2_table(), which checks
// CPUID first.

#include <immintrin.h>

#include "qnash/kernels.hpp"

namespace qnash::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Expands (w0, w1) to (w0, w0, w1, w1) to line up with interleaved re/im.
inline __m256d spread_pair(const double* w) {
  const __m256d v = _mm256_castpd128_pd256(_mm_loadu_pd(w));
  return _mm256_permute4x64_pd(v, 0b01010000);
}

double norm_squared_avx2(const cplx* z, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(z);
  const std::size_t len = 2 * n;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= len; k += 8) {
    const __m256d a = _mm256_loadu_pd(p + k);
    const __m256d b = _mm256_loadu_pd(p + k + 4);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
    acc1 = _mm256_fmadd_pd(b, b, acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < len; ++k) acc += p[k] * p[k];
  return acc;
}

double weighted_norm_squared_avx2(const double* w, const cplx* z, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(z);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d a = _mm256_loadu_pd(p + 2 * k);
    const __m256d b = _mm256_loadu_pd(p + 2 * k + 4);
    acc0 = _mm256_fmadd_pd(spread_pair(w + k), _mm256_mul_pd(a, a), acc0);
    acc1 = _mm256_fmadd_pd(spread_pair(w + k + 2), _mm256_mul_pd(b, b), acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) acc += w[k] * std::norm(z[k]);
  return acc;
}

void squared_moduli_avx2(const cplx* z, double* out, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(z);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d a = _mm256_loadu_pd(p + 2 * k);
    const __m256d b = _mm256_loadu_pd(p + 2 * k + 4);
    // hadd yields (|z0|^2, |z2|^2, |z1|^2, |z3|^2)
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    _mm256_storeu_pd(out + k, _mm256_permute4x64_pd(h, 0b11011000));
  }
  for (; k < n; ++k) out[k] = std::norm(z[k]);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4), acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) acc += a[k] * b[k];
  return acc;
}

void scale_avx2(cplx* z, double s, std::size_t n) {
  double* p = reinterpret_cast<double*>(z);
  const std::size_t len = 2 * n;
  const __m256d f = _mm256_set1_pd(s);
  std::size_t k = 0;
  for (; k + 4 <= len; k += 4) {
    _mm256_storeu_pd(p + k, _mm256_mul_pd(_mm256_loadu_pd(p + k), f));
  }
  for (; k < len; ++k) p[k] *= s;
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable kTable{
      norm_squared_avx2, weighted_norm_squared_avx2, squared_moduli_avx2,
      dot_avx2, scale_avx2};
  return kTable;
}

}  // namespace qnash::kernels
