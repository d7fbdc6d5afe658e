#pragma once

#include "d2nn/field.hpp"

namespace d2nn::fft {

/// In-place 2D complex DFT, unnormalized (same convention as the discrete
/// Fourier sum). Thread-safe; plans are cached per grid shape.
void forward(cplx* data, int rows, int cols);

/// In-place 2D inverse DFT, scaled by 1/(rows*cols) so inverse(forward(x)) == x.
void inverse(cplx* data, int rows, int cols);

inline void forward(ComplexField& f) { forward(f.data.data(), f.rows, f.cols); }
inline void inverse(ComplexField& f) { inverse(f.data.data(), f.rows, f.cols); }

}  // namespace d2nn::fft
