#include "d2nn/layers.hpp"

#include <cmath>

#include "d2nn/kernels.hpp"
#include "d2nn/propagation.hpp"

namespace d2nn {

ComplexField phasor(const PhaseMask& mask) {
  ComplexField out(mask.rows, mask.cols);
  for (size_t i = 0; i < mask.size(); ++i)
    out.data[i] = cplx(std::cos(mask.theta[i]), std::sin(mask.theta[i]));
  return out;
}

ComplexField modulate(const ComplexField& field, const PhaseMask& mask) {
  if (field.rows != mask.rows || field.cols != mask.cols)
    throw ValidationError("modulate: field and mask dimensions differ");
  ComplexField ph = phasor(mask);
  ComplexField out(field.rows, field.cols);
  kernels::cmul(field.data.data(), ph.data.data(), out.data.data(), out.size());
  return out;
}

void modulate_inplace(ComplexField& field, const ComplexField& phasor_field) {
  kernels::cmul(field.data.data(), phasor_field.data.data(), field.data.data(), field.size());
}

void modulate_adjoint_inplace(ComplexField& field, const ComplexField& phasor_field) {
  kernels::cmul_conj(phasor_field.data.data(), field.data.data(), field.data.data(), field.size());
}

ComplexField diffractive_layer(const ComplexField& field, const PhaseMask& mask,
                               const PropagationSpec& spec) {
  return modulate(propagate(field, spec), mask);
}

std::pair<ComplexField, ComplexField> split(const ComplexField& field,
                                            const BeamSplitterSpec& bs) {
  bs.validate();
  ComplexField t(field.rows, field.cols), r(field.rows, field.cols);
  kernels::scale(bs.transmitted, field.data.data(), t.data.data(), field.size());
  kernels::scale(bs.reflected, field.data.data(), r.data.data(), field.size());
  return {std::move(t), std::move(r)};
}

ComplexField combine(const ComplexField& a, const ComplexField& b) {
  if (!a.same_shape(b)) throw ValidationError("combine: dimension mismatch");
  ComplexField out = a;
  kernels::axpy(1.0, b.data.data(), out.data.data(), out.size());
  return out;
}

}  // namespace d2nn
