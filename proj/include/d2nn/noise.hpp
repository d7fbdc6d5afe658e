#pragma once

#include "d2nn/dataset.hpp"
#include "d2nn/model.hpp"
#include "d2nn/rng.hpp"

namespace d2nn {

/// One point of the robustness-evaluation grid. Sigma values are dimensionless
/// fractions: detector noise relative to the clean image's mean pixel
/// intensity, device variation in radians, splitter offset in amplitude
/// fraction.
struct NoiseSpec {
  double detector_sigma = 0.0;
  double detector_mu = 0.0;
  double device_sigma = 0.0;
  double splitter_epsilon = 0.0;
  uint64_t seed = 0;
  bool per_region = false;  // detector noise per readout cell instead of per pixel

  void validate() const;
  bool is_zero() const {
    return detector_sigma == 0.0 && detector_mu == 0.0 && device_sigma == 0.0 &&
           splitter_epsilon == 0.0;
  }
};

/// Adds i.i.d. Gaussian noise per pixel over the whole detector-plane image.
/// Absolute scale: spec fractions times the clean image's mean pixel value.
void apply_detector_noise(RealField& image, const NoiseSpec& spec, Rng& rng);

/// Per-cell variant (spec.per_region); reference level is the mean clean cell sum.
void apply_detector_noise_per_region(DetectorReading& reading, const NoiseSpec& spec, Rng& rng);

/// theta -> (theta + N(0, device_sigma^2)) mod 2*pi on every mask.
MultiTaskD2NN apply_phase_noise(const MultiTaskD2NN& model, const NoiseSpec& spec, Rng& rng);
MultiTaskD2NN apply_phase_noise(const MultiTaskD2NN& model, const NoiseSpec& spec);

/// (0.5 + eps, 0.5 - eps) around the given splitter.
BeamSplitterSpec apply_splitter_noise(const BeamSplitterSpec& bs, const NoiseSpec& spec);

/// Full noisy pipeline for one input: phase-noise the masks, run the forward
/// model with the perturbed splitter, add detector noise, read, decide.
/// Deterministic for a fixed spec (streams derived from spec.seed).
int noisy_inference(const MultiTaskD2NN& model, const ComplexField& input,
                    const NoiseSpec& spec, const LabelCodec& codec);

struct SweepRow {
  int task = 0;
  double detector_sigma = 0.0;
  double device_sigma = 0.0;
  double splitter_epsilon = 0.0;
  uint64_t seed = 0;
  double accuracy = 0.0;
};

/// Evaluates every grid point `repetitions` times with distinct derived seeds.
/// One repetition = one device draw (phase + splitter perturbation) plus
/// per-sample detector noise streams; rows appear in deterministic order and
/// are identical for any thread count.
std::vector<SweepRow> noise_sweep(const MultiTaskD2NN& model,
                                  const std::vector<Dataset>& test_sets,
                                  const std::vector<NoiseSpec>& grid, int repetitions,
                                  const EncodeOptions& enc, int threads);

std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace d2nn
