#pragma once

#include <utility>

#include "d2nn/field.hpp"

namespace d2nn {

/// Trainable phase values of one diffractive layer, radians, row-major.
/// Stored unconstrained; the applied modulation exp(j*theta) is 2*pi-periodic.
struct PhaseMask {
  int rows = 0;
  int cols = 0;
  std::vector<double> theta;

  PhaseMask() = default;
  PhaseMask(int r, int c) : rows(r), cols(c), theta(static_cast<size_t>(r) * c, 0.0) {}

  size_t size() const { return theta.size(); }
  double& at(int r, int c) { return theta[static_cast<size_t>(r) * cols + c]; }
};

/// Amplitude fractions of the two splitter outputs. The nominal 50-50 device
/// uses amplitude factor 0.5 per branch (each branch carries 1/4 of the
/// power), matching the forward model this simulator reproduces; a lossless
/// physical splitter (1/sqrt(2)) is available via configuration.
struct BeamSplitterSpec {
  double transmitted = 0.5;
  double reflected = 0.5;

  void validate() const {
    if (transmitted < 0.0 || transmitted > 1.0 || reflected < 0.0 || reflected > 1.0)
      throw ValidationError("BeamSplitterSpec: fractions must lie in [0, 1]");
  }
};

/// exp(j*theta) per pixel.
ComplexField phasor(const PhaseMask& mask);

/// out[i] = field[i] * exp(j*theta[i]); magnitudes preserved per pixel.
ComplexField modulate(const ComplexField& field, const PhaseMask& mask);

/// In-place multiply by a precomputed phasor field (training hot path).
void modulate_inplace(ComplexField& field, const ComplexField& phasor_field);

/// In-place multiply by conj(phasor); adjoint of modulate w.r.t. its input.
void modulate_adjoint_inplace(ComplexField& field, const ComplexField& phasor_field);

/// One diffractive layer: free-space propagation to the mask plane, then
/// phase modulation.
ComplexField diffractive_layer(const ComplexField& field, const PhaseMask& mask,
                               const PropagationSpec& spec);

/// (transmitted_fraction * field, reflected_fraction * field).
std::pair<ComplexField, ComplexField> split(const ComplexField& field,
                                            const BeamSplitterSpec& bs);

/// Coherent superposition a + b.
ComplexField combine(const ComplexField& a, const ComplexField& b);

}  // namespace d2nn
