#pragma once

#include <cmath>
#include <string>

#include "d2nn/field.hpp"
#include "d2nn/rng.hpp"

namespace d2nn::test {

inline std::string source_dir() { return D2NN_SOURCE_DIR; }

inline ComplexField random_field(int rows, int cols, Rng& rng, double scale = 1.0) {
  ComplexField f(rows, cols);
  for (cplx& z : f.data) z = cplx(rng.uniform(-scale, scale), rng.uniform(-scale, scale));
  return f;
}

inline double max_abs_diff(const ComplexField& a, const ComplexField& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

/// O(N^4) reference DFT, independent of the library FFT.
inline ComplexField naive_dft2(const ComplexField& in, int sign) {
  const int R = in.rows, C = in.cols;
  ComplexField out(R, C);
  for (int u = 0; u < R; ++u)
    for (int v = 0; v < C; ++v) {
      cplx acc(0.0, 0.0);
      for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) {
          const double phase =
              sign * 2.0 * kPi * (static_cast<double>(u) * r / R + static_cast<double>(v) * c / C);
          acc += in.at(r, c) * cplx(std::cos(phase), std::sin(phase));
        }
      out.at(u, v) = acc;
    }
  return out;
}

}  // namespace d2nn::test
