#include "d2nn/field.hpp"

#include <cmath>

#include "d2nn/kernels.hpp"

namespace d2nn {

bool ComplexField::finite() const {
  for (const cplx& z : data)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

double ComplexField::energy() const { return kernels::sum_abs2(data.data(), data.size()); }

bool RealField::finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

void PropagationSpec::validate() const {
  if (!(wavelength > 0.0)) throw ValidationError("PropagationSpec: wavelength must be > 0");
  if (!(layer_distance > 0.0)) throw ValidationError("PropagationSpec: layer_distance must be > 0");
  if (!(pixel_pitch > 0.0)) throw ValidationError("PropagationSpec: pixel_pitch must be > 0");
  for (int n : {grid_rows, grid_cols}) {
    if (n < 2) throw ValidationError("PropagationSpec: grid dimensions must be >= 2");
    if (n % 2 != 0) throw ValidationError("PropagationSpec: grid dimensions must be even");
  }
}

}  // namespace d2nn
