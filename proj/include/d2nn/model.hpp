#pragma once

#include <cstdint>

#include "d2nn/detector.hpp"
#include "d2nn/field.hpp"
#include "d2nn/layers.hpp"
#include "d2nn/propagation.hpp"

namespace d2nn {

/// Topology and physics of a multi-task network: S shared layers feeding a
/// beam splitter, T branches of B task layers each, one mask-free propagation
/// to the shared detector plane.
struct ModelArch {
  int shared_layers = 4;
  int branch_layers = 2;
  int tasks = 2;
  int grid_rows = 200;
  int grid_cols = 200;
  double wavelength = 0.75e-3;
  double pixel_pitch = 0.4e-3;
  double layer_distance = 30e-3;
  bool zero_pad = false;
  // When set, the first shared mask modulates the input plane directly and the
  // initial free-space hop is skipped (propagate-then-modulate is the default
  // ordering everywhere else).
  bool input_plane_modulation = false;
  double splitter_transmitted = 0.5;
  double splitter_reflected = 0.5;
  int detector_sub_split = 1;
  std::vector<Rect> custom_regions;  // empty selects the canonical 2x5 layout
  uint64_t init_seed = 1;

  void validate() const;
  PropagationSpec propagation() const;
  DetectorLayout make_layout() const;
};

struct MultiTaskD2NN {
  ModelArch arch;
  BeamSplitterSpec splitter;
  DetectorLayout layout;
  std::vector<PhaseMask> shared;
  std::vector<std::vector<PhaseMask>> branches;  // [task][layer]

  int mask_count() const {
    return static_cast<int>(shared.size()) +
           arch.tasks * static_cast<int>(branches.empty() ? 0 : branches[0].size());
  }
  /// Canonical mask order: shared masks, then branch 0's stack, branch 1's, ...
  PhaseMask& mask(int index);
  const PhaseMask& mask(int index) const;
  int shared_mask_index(int s) const { return s; }
  int branch_mask_index(int b, int l) const {
    return static_cast<int>(shared.size()) + b * arch.branch_layers + l;
  }

  /// Per-branch amplitude fractions derived from the splitter (a two-level
  /// splitter tree for T = 4); epsilon perturbs the first split as
  /// (t + eps, r - eps).
  std::vector<double> branch_amplitudes(double epsilon = 0.0) const;
};

/// Masks initialized i.i.d. uniform on [0, 2*pi); bit-identical for a fixed
/// seed.
MultiTaskD2NN build_model(const ModelArch& arch);

/// Precomputed per-parameter-snapshot state for repeated forward/backward
/// evaluation: the propagation operator and every mask's phasor field.
/// Rebuild after every optimizer step.
struct ModelCache {
  Propagator prop;
  std::vector<ComplexField> shared_phasors;
  std::vector<std::vector<ComplexField>> branch_phasors;

  explicit ModelCache(const MultiTaskD2NN& model);
};

/// Intermediate fields retained by a forward pass; consumed by visualization
/// and by the adjoint sweep. Buffers are reused across calls.
struct ForwardTape {
  std::vector<ComplexField> trunk;                 // after each shared layer
  std::vector<std::vector<ComplexField>> branch;   // after each branch layer
  ComplexField combined;                           // coherent sum at the detector plane
  RealField intensity;
};

/// Forward pass through the cached model. splitter_epsilon perturbs the branch
/// amplitudes (noise injection); tape may be null when intermediates are not
/// needed. branch_detector, when non-null, receives each branch's field at the
/// detector plane (visualization).
RealField forward_pass(const MultiTaskD2NN& model, const ModelCache& cache,
                       const ComplexField& input, ForwardTape* tape,
                       double splitter_epsilon = 0.0,
                       std::vector<ComplexField>* branch_detector = nullptr);

/// One-shot forward: builds a cache, checks shapes and finiteness.
RealField forward(const MultiTaskD2NN& model, const ComplexField& input);

/// Forward retaining every stage for export.
struct ForwardTrace {
  ComplexField input;
  std::vector<ComplexField> trunk;
  std::vector<std::vector<ComplexField>> branch;
  std::vector<ComplexField> branch_detector;
  ComplexField combined;
  RealField intensity;

  /// Stage count along one branch path: trunk + branch + combine + intensity.
  int canonical_stage_count() const {
    return static_cast<int>(trunk.size()) +
           static_cast<int>(branch.empty() ? 0 : branch[0].size()) + 2;
  }
};

ForwardTrace forward_trace(const MultiTaskD2NN& model, const ComplexField& input);

}  // namespace d2nn
