#include "d2nn/kernels.hpp"

// Reference kernels. Plain loops over (re, im) pairs; these define the
// semantics the SIMD variants are equivalence-tested against.

namespace d2nn::kernels {
namespace {

void cmul_scalar(const cplx* a, const cplx* b, cplx* dst, size_t n) {
  for (size_t i = 0; i < n; ++i) dst[i] = a[i] * b[i];
}

void cmul_conj_scalar(const cplx* a, const cplx* b, cplx* dst, size_t n) {
  for (size_t i = 0; i < n; ++i) dst[i] = std::conj(a[i]) * b[i];
}

void intensity_scalar(const cplx* z, double* dst, size_t n) {
  for (size_t i = 0; i < n; ++i)
    dst[i] = z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
}

void intensity_adjoint_scalar(const cplx* z, const double* g, cplx* dst, size_t n) {
  for (size_t i = 0; i < n; ++i) dst[i] = 2.0 * g[i] * z[i];
}

double sum_abs2_scalar(const cplx* z, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i)
    acc += z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
  return acc;
}

void axpy_scalar(double a, const cplx* x, cplx* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, const cplx* x, cplx* dst, size_t n) {
  for (size_t i = 0; i < n; ++i) dst[i] = a * x[i];
}

void phase_grad_acc_scalar(const cplx* y, const cplx* u, double* g, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    // Im(conj(y) * u) = re(y)*im(u) - im(y)*re(u)
    g[i] += y[i].real() * u[i].imag() - y[i].imag() * u[i].real();
  }
}

}  // namespace

const Ops scalar_ops = {
    cmul_scalar,    cmul_conj_scalar, intensity_scalar, intensity_adjoint_scalar,
    sum_abs2_scalar, axpy_scalar,     scale_scalar,     phase_grad_acc_scalar,
};

}  // namespace d2nn::kernels
