// AVX2+FMA variants of the field kernels. Compiled with -mavx2 -mfma on x86-64
// only; selected at runtime after CPU detection (see kernels.cpp).

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "d2nn/kernels.hpp"

namespace d2nn::kernels {
namespace {

inline const double* dp(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cplx* p) { return reinterpret_cast<double*>(p); }

// [a0, a1] complex per 256-bit vector; the classic mul idiom:
// re = ar*br - ai*bi, im = ar*bi + ai*br via fmaddsub.
inline __m256d cmul2(__m256d a, __m256d b) {
  __m256d b_re = _mm256_movedup_pd(b);
  __m256d b_im = _mm256_permute_pd(b, 0xF);
  __m256d a_sw = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

inline __m256d conj2(__m256d a) {
  const __m256d neg_im = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
  return _mm256_xor_pd(a, neg_im);
}

void cmul_avx2(const cplx* a, const cplx* b, cplx* dst, size_t n) {
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(dp(a + i));
    __m256d vb = _mm256_loadu_pd(dp(b + i));
    _mm256_storeu_pd(dp(dst + i), cmul2(va, vb));
  }
  if (i < n) scalar_ops.cmul(a + i, b + i, dst + i, n - i);
}

void cmul_conj_avx2(const cplx* a, const cplx* b, cplx* dst, size_t n) {
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = conj2(_mm256_loadu_pd(dp(a + i)));
    __m256d vb = _mm256_loadu_pd(dp(b + i));
    _mm256_storeu_pd(dp(dst + i), cmul2(va, vb));
  }
  if (i < n) scalar_ops.cmul_conj(a + i, b + i, dst + i, n - i);
}

void intensity_avx2(const cplx* z, double* dst, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d z01 = _mm256_loadu_pd(dp(z + i));
    __m256d z23 = _mm256_loadu_pd(dp(z + i + 2));
    __m256d s1 = _mm256_mul_pd(z01, z01);
    __m256d s2 = _mm256_mul_pd(z23, z23);
    // hadd pairs lanes as [|z0|^2, |z2|^2, |z1|^2, |z3|^2]; restore order
    __m256d h = _mm256_hadd_pd(s1, s2);
    _mm256_storeu_pd(dst + i, _mm256_permute4x64_pd(h, _MM_SHUFFLE(3, 1, 2, 0)));
  }
  if (i < n) scalar_ops.intensity(z + i, dst + i, n - i);
}

void intensity_adjoint_avx2(const cplx* z, const double* g, cplx* dst, size_t n) {
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m128d g01 = _mm_loadu_pd(g + i);
    __m256d gg = _mm256_permute4x64_pd(_mm256_castpd128_pd256(g01), _MM_SHUFFLE(1, 1, 0, 0));
    __m256d t = _mm256_mul_pd(gg, _mm256_loadu_pd(dp(z + i)));
    _mm256_storeu_pd(dp(dst + i), _mm256_add_pd(t, t));
  }
  if (i < n) scalar_ops.intensity_adjoint(z + i, g + i, dst + i, n - i);
}

double sum_abs2_avx2(const cplx* z, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d v = _mm256_loadu_pd(dp(z + i));
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  __m128d s = _mm_add_pd(lo, hi);
  double total = _mm_cvtsd_f64(_mm_hadd_pd(s, s));
  if (i < n) total += scalar_ops.sum_abs2(z + i, n - i);
  return total;
}

void axpy_avx2(double a, const cplx* x, cplx* y, size_t n) {
  __m256d va = _mm256_set1_pd(a);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vy = _mm256_loadu_pd(dp(y + i));
    _mm256_storeu_pd(dp(y + i), _mm256_fmadd_pd(va, _mm256_loadu_pd(dp(x + i)), vy));
  }
  if (i < n) scalar_ops.axpy(a, x + i, y + i, n - i);
}

void scale_avx2(double a, const cplx* x, cplx* dst, size_t n) {
  __m256d va = _mm256_set1_pd(a);
  size_t i = 0;
  for (; i + 2 <= n; i += 2)
    _mm256_storeu_pd(dp(dst + i), _mm256_mul_pd(va, _mm256_loadu_pd(dp(x + i))));
  if (i < n) scalar_ops.scale(a, x + i, dst + i, n - i);
}

void phase_grad_acc_avx2(const cplx* y, const cplx* u, double* g, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d y01 = _mm256_loadu_pd(dp(y + i));
    __m256d y23 = _mm256_loadu_pd(dp(y + i + 2));
    __m256d u01 = _mm256_permute_pd(_mm256_loadu_pd(dp(u + i)), 0x5);
    __m256d u23 = _mm256_permute_pd(_mm256_loadu_pd(dp(u + i + 2)), 0x5);
    // p = [yr*ui, yi*ur, ...]; hsub gives yr*ui - yi*ur per pair, order-fixed below
    __m256d h = _mm256_hsub_pd(_mm256_mul_pd(y01, u01), _mm256_mul_pd(y23, u23));
    __m256d d = _mm256_permute4x64_pd(h, _MM_SHUFFLE(3, 1, 2, 0));
    _mm256_storeu_pd(g + i, _mm256_add_pd(_mm256_loadu_pd(g + i), d));
  }
  if (i < n) scalar_ops.phase_grad_acc(y + i, u + i, g + i, n - i);
}

}  // namespace

const Ops avx2_ops = {
    cmul_avx2,     cmul_conj_avx2, intensity_avx2, intensity_adjoint_avx2,
    sum_abs2_avx2, axpy_avx2,      scale_avx2,     phase_grad_acc_avx2,
};

}  // namespace d2nn::kernels

#endif  // x86-64
