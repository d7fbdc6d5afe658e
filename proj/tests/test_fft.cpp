#include <doctest.h>

#include "d2nn/fft.hpp"
#include "test_util.hpp"

using namespace d2nn;
using test::naive_dft2;
using test::random_field;

TEST_CASE("fft matches the direct DFT sum") {
  Rng rng(3);
  for (auto [r, c] : {std::pair{2, 2}, {4, 6}, {8, 8}, {10, 10}, {16, 12}}) {
    ComplexField x = random_field(r, c, rng);
    ComplexField ref = naive_dft2(x, -1);  // forward: exp(-j 2 pi ...)
    ComplexField got = x;
    fft::forward(got);
    CHECK(test::max_abs_diff(ref, got) < 1e-10);
  }
}

TEST_CASE("inverse undoes forward") {
  Rng rng(5);
  ComplexField x = random_field(20, 14, rng);
  ComplexField y = x;
  fft::forward(y);
  fft::inverse(y);
  CHECK(test::max_abs_diff(x, y) < 1e-13);
}

TEST_CASE("Parseval: spectrum energy is N times field energy") {
  Rng rng(9);
  ComplexField x = random_field(16, 16, rng);
  ComplexField X = x;
  fft::forward(X);
  CHECK(X.energy() == doctest::Approx(x.energy() * x.size()).epsilon(1e-12));
}
