#pragma once

#include <complex>
#include <cstddef>

// Data-parallel inner loops of the field pipeline. Every operation has a scalar
// reference implementation and may have SIMD variants; the active backend is
// selected at runtime (CPU detection, overridable via set_backend or the
// D2NN_KERNELS environment variable: "scalar" | "avx2" | "auto").
//
// Complex arrays are std::complex<double>, i.e. interleaved (re, im) doubles.

namespace d2nn::kernels {

using cplx = std::complex<double>;

struct Ops {
  // dst[i] = a[i] * b[i]
  void (*cmul)(const cplx* a, const cplx* b, cplx* dst, size_t n);
  // dst[i] = conj(a[i]) * b[i]
  void (*cmul_conj)(const cplx* a, const cplx* b, cplx* dst, size_t n);
  // dst[i] = |z[i]|^2
  void (*intensity)(const cplx* z, double* dst, size_t n);
  // dst[i] = 2 * g[i] * z[i]   (adjoint of |z|^2 with real upstream g)
  void (*intensity_adjoint)(const cplx* z, const double* g, cplx* dst, size_t n);
  // sum_i |z[i]|^2
  double (*sum_abs2)(const cplx* z, size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const cplx* x, cplx* y, size_t n);
  // dst[i] = a * x[i]
  void (*scale)(double a, const cplx* x, cplx* dst, size_t n);
  // g[i] += Im(conj(y[i]) * u[i])   (phase-parameter gradient accumulation)
  void (*phase_grad_acc)(const cplx* y, const cplx* u, double* g, size_t n);
};

enum class Backend { scalar, avx2 };

/// Active operation table. First call performs CPU detection.
const Ops& ops();

/// Force a backend; throws ValidationError if unsupported on this CPU.
void set_backend(Backend b);
Backend active_backend();
const char* backend_name();
bool avx2_supported();

extern const Ops scalar_ops;
#if defined(__x86_64__) || defined(_M_X64)
extern const Ops avx2_ops;
#endif

// Convenience wrappers through the active table.
inline void cmul(const cplx* a, const cplx* b, cplx* dst, size_t n) { ops().cmul(a, b, dst, n); }
inline void cmul_conj(const cplx* a, const cplx* b, cplx* dst, size_t n) { ops().cmul_conj(a, b, dst, n); }
inline void intensity(const cplx* z, double* dst, size_t n) { ops().intensity(z, dst, n); }
inline void intensity_adjoint(const cplx* z, const double* g, cplx* dst, size_t n) { ops().intensity_adjoint(z, g, dst, n); }
inline double sum_abs2(const cplx* z, size_t n) { return ops().sum_abs2(z, n); }
inline void axpy(double a, const cplx* x, cplx* y, size_t n) { ops().axpy(a, x, y, n); }
inline void scale(double a, const cplx* x, cplx* dst, size_t n) { ops().scale(a, x, dst, n); }
inline void phase_grad_acc(const cplx* y, const cplx* u, double* g, size_t n) { ops().phase_grad_acc(y, u, g, n); }

}  // namespace d2nn::kernels
