#pragma once

#include "d2nn/field.hpp"

namespace d2nn {

/// Free-space transfer function H on the FFT-ordered frequency grid
/// f = m / (N * pitch), m in [-N/2, N/2):
///   H(fx, fy) = exp(j*k*d) * exp(-j*pi*lambda*d*(fx^2 + fy^2))
/// Pure phase: |H| = 1 everywhere.
ComplexField transfer_function(const PropagationSpec& spec);

/// Sampled impulse response h = IDFT(H), computed by direct summation so the
/// convolution oracle shares no FFT code with the fast path. Grid capped at
/// 64x64.
ComplexField sampled_impulse_response(const PropagationSpec& spec);

/// Fast path: IFFT(FFT(field) .* H). Energy-preserving (|H| = 1, Parseval).
ComplexField propagate(const ComplexField& field, const PropagationSpec& spec);

/// Applies the conjugate filter conj(H); exact inverse of propagate and the
/// adjoint used by backpropagation.
ComplexField propagate_adjoint(const ComplexField& field, const PropagationSpec& spec);

/// Brute-force oracle: O(N^4) circular convolution with the sampled impulse
/// response. Grids above 64x64 (after padding, if any) are rejected.
ComplexField propagate_direct(const ComplexField& field, const PropagationSpec& spec);

/// Reusable propagation operator holding the precomputed transfer function;
/// the in-place workhorse behind propagate()/propagate_adjoint() and the
/// training hot path.
class Propagator {
 public:
  explicit Propagator(const PropagationSpec& spec);

  const PropagationSpec& spec() const { return spec_; }

  void apply(ComplexField& f) const;
  void apply_adjoint(ComplexField& f) const;

 private:
  void filtered(ComplexField& f, bool conjugate) const;

  PropagationSpec spec_;
  ComplexField transfer_;  // sized to the padded grid when zero_pad is set
};

}  // namespace d2nn
