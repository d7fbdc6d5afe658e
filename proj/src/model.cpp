#include "d2nn/model.hpp"

#include "d2nn/kernels.hpp"
#include "d2nn/rng.hpp"

namespace d2nn {

void ModelArch::validate() const {
  propagation().validate();
  if (shared_layers < 1) throw ValidationError("ModelArch: need at least one shared layer");
  if (branch_layers < 1) throw ValidationError("ModelArch: need at least one branch layer");
  if (tasks != 1 && tasks != 2 && tasks != 4)
    throw ValidationError("ModelArch: supported task counts are 1, 2, and 4");
  if (detector_sub_split != 1 && detector_sub_split != 2)
    throw ValidationError("ModelArch: detector_sub_split must be 1 or 2");
  if (tasks == 4 && detector_sub_split != 2)
    throw ValidationError("ModelArch: the 4-task system needs detector_sub_split = 2");
  BeamSplitterSpec{splitter_transmitted, splitter_reflected}.validate();
  make_layout();  // throws on bad geometry
}

PropagationSpec ModelArch::propagation() const {
  return {wavelength, layer_distance, pixel_pitch, grid_rows, grid_cols, zero_pad};
}

DetectorLayout ModelArch::make_layout() const {
  if (custom_regions.empty()) return default_layout(grid_rows, grid_cols, detector_sub_split);
  DetectorLayout layout{custom_regions, detector_sub_split};
  layout.validate(grid_rows, grid_cols);
  return layout;
}

PhaseMask& MultiTaskD2NN::mask(int index) {
  const int s = static_cast<int>(shared.size());
  if (index < s) return shared[index];
  const int b = (index - s) / arch.branch_layers;
  return branches[b][(index - s) % arch.branch_layers];
}

const PhaseMask& MultiTaskD2NN::mask(int index) const {
  return const_cast<MultiTaskD2NN*>(this)->mask(index);
}

std::vector<double> MultiTaskD2NN::branch_amplitudes(double epsilon) const {
  const double t = splitter.transmitted + epsilon;
  const double r = splitter.reflected - epsilon;
  switch (arch.tasks) {
    case 1: return {1.0};
    case 2: return {t, r};
    case 4:
      // two-level tree; the perturbation acts on the first split
      return {t * splitter.transmitted, t * splitter.reflected,
              r * splitter.transmitted, r * splitter.reflected};
    default: throw ValidationError("branch_amplitudes: unsupported task count");
  }
}

MultiTaskD2NN build_model(const ModelArch& arch) {
  arch.validate();
  MultiTaskD2NN model;
  model.arch = arch;
  model.splitter = {arch.splitter_transmitted, arch.splitter_reflected};
  model.layout = arch.make_layout();

  Rng rng(mix_seed(arch.init_seed, 0x6d61736bULL));
  auto random_mask = [&] {
    PhaseMask m(arch.grid_rows, arch.grid_cols);
    for (double& v : m.theta) v = rng.uniform(0.0, 2.0 * kPi);
    return m;
  };
  for (int s = 0; s < arch.shared_layers; ++s) model.shared.push_back(random_mask());
  model.branches.resize(arch.tasks);
  for (int b = 0; b < arch.tasks; ++b)
    for (int l = 0; l < arch.branch_layers; ++l) model.branches[b].push_back(random_mask());
  return model;
}

ModelCache::ModelCache(const MultiTaskD2NN& model) : prop(model.arch.propagation()) {
  for (const PhaseMask& m : model.shared) shared_phasors.push_back(phasor(m));
  branch_phasors.resize(model.branches.size());
  for (size_t b = 0; b < model.branches.size(); ++b)
    for (const PhaseMask& m : model.branches[b]) branch_phasors[b].push_back(phasor(m));
}

RealField forward_pass(const MultiTaskD2NN& model, const ModelCache& cache,
                       const ComplexField& input, ForwardTape* tape,
                       double splitter_epsilon,
                       std::vector<ComplexField>* branch_detector) {
  const int S = static_cast<int>(model.shared.size());
  const int T = model.arch.tasks;
  const int B = model.arch.branch_layers;
  const auto amps = model.branch_amplitudes(splitter_epsilon);

  if (tape) {
    tape->trunk.resize(S);
    tape->branch.resize(T);
    for (auto& b : tape->branch) b.resize(B);
  }
  if (branch_detector) branch_detector->resize(T);

  ComplexField x = input;
  for (int s = 0; s < S; ++s) {
    if (s > 0 || !model.arch.input_plane_modulation) cache.prop.apply(x);
    modulate_inplace(x, cache.shared_phasors[s]);
    if (tape) tape->trunk[s] = x;
  }

  ComplexField combined;
  ComplexField y;
  for (int b = 0; b < T; ++b) {
    y.rows = x.rows;
    y.cols = x.cols;
    y.data.resize(x.size());
    kernels::scale(amps[b], x.data.data(), y.data.data(), x.size());
    for (int l = 0; l < B; ++l) {
      cache.prop.apply(y);
      modulate_inplace(y, cache.branch_phasors[b][l]);
      if (tape) tape->branch[b][l] = y;
    }
    cache.prop.apply(y);  // mask-free hop to the detector plane
    if (branch_detector) (*branch_detector)[b] = y;
    if (b == 0)
      combined = y;
    else
      kernels::axpy(1.0, y.data.data(), combined.data.data(), combined.size());
  }

  RealField intensity(combined.rows, combined.cols);
  kernels::intensity(combined.data.data(), intensity.data.data(), combined.size());
  if (tape) {
    tape->combined = std::move(combined);
    tape->intensity = intensity;
  }
  return intensity;
}

RealField forward(const MultiTaskD2NN& model, const ComplexField& input) {
  check_shape(input, model.arch.propagation(), "forward");
  ModelCache cache(model);
  RealField out = forward_pass(model, cache, input, nullptr);
  if (!out.finite()) throw std::runtime_error("forward: non-finite intensity output");
  return out;
}

ForwardTrace forward_trace(const MultiTaskD2NN& model, const ComplexField& input) {
  check_shape(input, model.arch.propagation(), "forward_trace");
  ModelCache cache(model);
  ForwardTrace trace;
  trace.input = input;
  ForwardTape tape;
  trace.intensity = forward_pass(model, cache, input, &tape, 0.0, &trace.branch_detector);
  if (!trace.intensity.finite()) throw std::runtime_error("forward_trace: non-finite intensity");
  trace.trunk = std::move(tape.trunk);
  trace.branch = std::move(tape.branch);
  trace.combined = std::move(tape.combined);
  return trace;
}

}  // namespace d2nn
