#include <doctest.h>

#include <vector>

#include "d2nn/kernels.hpp"
#include "d2nn/rng.hpp"
#include "test_util.hpp"

using namespace d2nn;
namespace k = d2nn::kernels;

namespace {

struct BackendGuard {
  k::Backend saved = k::active_backend();
  ~BackendGuard() { k::set_backend(saved); }
};

std::vector<cplx> random_cvec(size_t n, Rng& rng) {
  std::vector<cplx> v(n);
  for (cplx& z : v) z = cplx(rng.uniform(-2, 2), rng.uniform(-2, 2));
  return v;
}

std::vector<double> random_rvec(size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-2, 2);
  return v;
}

constexpr double kTol = 1e-13;

}  // namespace

TEST_CASE("scalar kernels match std::complex semantics") {
  Rng rng(11);
  const size_t n = 37;
  auto a = random_cvec(n, rng), b = random_cvec(n, rng);
  std::vector<cplx> dst(n);
  k::scalar_ops.cmul(a.data(), b.data(), dst.data(), n);
  for (size_t i = 0; i < n; ++i) CHECK(std::abs(dst[i] - a[i] * b[i]) < kTol);
  k::scalar_ops.cmul_conj(a.data(), b.data(), dst.data(), n);
  for (size_t i = 0; i < n; ++i) CHECK(std::abs(dst[i] - std::conj(a[i]) * b[i]) < kTol);

  std::vector<double> inten(n);
  k::scalar_ops.intensity(a.data(), inten.data(), n);
  for (size_t i = 0; i < n; ++i) CHECK(inten[i] == doctest::Approx(std::norm(a[i])).epsilon(1e-14));

  double e = k::scalar_ops.sum_abs2(a.data(), n);
  double ref = 0.0;
  for (const cplx& z : a) ref += std::norm(z);
  CHECK(e == doctest::Approx(ref).epsilon(1e-13));
}

TEST_CASE("avx2 kernels are equivalent to the scalar reference") {
  if (!k::avx2_supported()) return;  // nothing to compare on this host
  Rng rng(7);
  // sizes straddling every vector-width remainder
  for (size_t n : {1ul, 2ul, 3ul, 4ul, 5ul, 7ul, 8ul, 64ul, 101ul, 1000ul}) {
    auto a = random_cvec(n, rng), b = random_cvec(n, rng);
    auto g = random_rvec(n, rng);

    std::vector<cplx> s1(n), s2(n);
    k::scalar_ops.cmul(a.data(), b.data(), s1.data(), n);
    k::avx2_ops.cmul(a.data(), b.data(), s2.data(), n);
    for (size_t i = 0; i < n; ++i) CHECK(std::abs(s1[i] - s2[i]) < kTol);

    k::scalar_ops.cmul_conj(a.data(), b.data(), s1.data(), n);
    k::avx2_ops.cmul_conj(a.data(), b.data(), s2.data(), n);
    for (size_t i = 0; i < n; ++i) CHECK(std::abs(s1[i] - s2[i]) < kTol);

    std::vector<double> r1(n), r2(n);
    k::scalar_ops.intensity(a.data(), r1.data(), n);
    k::avx2_ops.intensity(a.data(), r2.data(), n);
    for (size_t i = 0; i < n; ++i) CHECK(r1[i] == doctest::Approx(r2[i]).epsilon(1e-13));

    k::scalar_ops.intensity_adjoint(a.data(), g.data(), s1.data(), n);
    k::avx2_ops.intensity_adjoint(a.data(), g.data(), s2.data(), n);
    for (size_t i = 0; i < n; ++i) CHECK(std::abs(s1[i] - s2[i]) < kTol);

    CHECK(k::scalar_ops.sum_abs2(a.data(), n) ==
          doctest::Approx(k::avx2_ops.sum_abs2(a.data(), n)).epsilon(1e-12));

    std::vector<cplx> y1 = b, y2 = b;
    k::scalar_ops.axpy(0.37, a.data(), y1.data(), n);
    k::avx2_ops.axpy(0.37, a.data(), y2.data(), n);
    for (size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) < kTol);

    k::scalar_ops.scale(-1.25, a.data(), s1.data(), n);
    k::avx2_ops.scale(-1.25, a.data(), s2.data(), n);
    for (size_t i = 0; i < n; ++i) CHECK(std::abs(s1[i] - s2[i]) < kTol);

    std::vector<double> g1 = g, g2 = g;
    k::scalar_ops.phase_grad_acc(a.data(), b.data(), g1.data(), n);
    k::avx2_ops.phase_grad_acc(a.data(), b.data(), g2.data(), n);
    for (size_t i = 0; i < n; ++i) CHECK(g1[i] == doctest::Approx(g2[i]).epsilon(1e-12));
  }
}

TEST_CASE("backend selection is explicit and reversible") {
  BackendGuard guard;
  k::set_backend(k::Backend::scalar);
  CHECK(k::active_backend() == k::Backend::scalar);
  CHECK(std::string(k::backend_name()) == "scalar");
  if (k::avx2_supported()) {
    k::set_backend(k::Backend::avx2);
    CHECK(std::string(k::backend_name()) == "avx2");
  }
}

TEST_CASE("phase_grad_acc accumulates Im(conj(y) * u)") {
  std::vector<cplx> y = {cplx(1, 2), cplx(-3, 0.5)};
  std::vector<cplx> u = {cplx(0.25, -1), cplx(2, 2)};
  std::vector<double> g = {10.0, -5.0};
  k::scalar_ops.phase_grad_acc(y.data(), u.data(), g.data(), 2);
  CHECK(g[0] == doctest::Approx(10.0 + std::imag(std::conj(y[0]) * u[0])));
  CHECK(g[1] == doctest::Approx(-5.0 + std::imag(std::conj(y[1]) * u[1])));
}
