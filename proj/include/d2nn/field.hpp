#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace d2nn {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Thrown for invalid configuration or precondition violations (CLI exit code 1).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// H x W grid of complex amplitudes, row-major: the optical field at one plane.
struct ComplexField {
  int rows = 0;
  int cols = 0;
  std::vector<cplx> data;

  ComplexField() = default;
  ComplexField(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c) {}

  size_t size() const { return data.size(); }
  cplx& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  const cplx& at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
  bool same_shape(const ComplexField& o) const { return rows == o.rows && cols == o.cols; }

  bool finite() const;
  /// Sum of |z|^2 over all pixels.
  double energy() const;
};

/// H x W grid of reals, row-major (intensity images, noise masks, heatmap sources).
struct RealField {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  RealField() = default;
  RealField(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  size_t size() const { return data.size(); }
  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
  bool finite() const;
};

/// Free-space propagation geometry: wavelength, plane separation, pixel pitch, grid shape.
/// The wavenumber k = 2*pi/wavelength is always derived, never stored.
struct PropagationSpec {
  double wavelength = 0.75e-3;     // meters
  double layer_distance = 30e-3;   // meters
  double pixel_pitch = 0.4e-3;     // meters
  int grid_rows = 200;
  int grid_cols = 200;
  bool zero_pad = false;           // pad each axis to 2N during propagation (default: periodic wrap)

  double wavenumber() const { return 2.0 * kPi / wavelength; }

  /// Throws ValidationError unless lengths are positive and grid dims are even and >= 2.
  void validate() const;
};

inline void check_shape(const ComplexField& f, const PropagationSpec& spec,
                        const char* what) {
  if (f.rows != spec.grid_rows || f.cols != spec.grid_cols)
    throw ValidationError(std::string(what) + ": field " + std::to_string(f.rows) + "x" +
                          std::to_string(f.cols) + " does not match grid " +
                          std::to_string(spec.grid_rows) + "x" + std::to_string(spec.grid_cols));
}

}  // namespace d2nn
