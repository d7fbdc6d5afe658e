#include "d2nn/noise.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "d2nn/parallel.hpp"

namespace d2nn {
namespace {

constexpr uint64_t kPhaseStream = 0x70686173ULL;
constexpr uint64_t kDetectorStream = 0x64657463ULL;

double wrap_two_pi(double x) {
  double w = std::fmod(x, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  return w;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

void NoiseSpec::validate() const {
  if (detector_sigma < 0.0 || device_sigma < 0.0)
    throw ValidationError("NoiseSpec: sigmas must be >= 0");
  if (splitter_epsilon < -0.1 || splitter_epsilon > 0.1)
    throw ValidationError("NoiseSpec: splitter_epsilon must lie in [-0.1, 0.1]");
}

void apply_detector_noise(RealField& image, const NoiseSpec& spec, Rng& rng) {
  spec.validate();
  if (spec.detector_sigma == 0.0 && spec.detector_mu == 0.0) return;
  const double ref = mean_of(image.data);
  const double mu = spec.detector_mu * ref;
  const double sigma = spec.detector_sigma * ref;
  for (double& px : image.data) px += mu + sigma * rng.gaussian();
}

void apply_detector_noise_per_region(DetectorReading& reading, const NoiseSpec& spec, Rng& rng) {
  spec.validate();
  if (spec.detector_sigma == 0.0 && spec.detector_mu == 0.0) return;
  const double ref = mean_of(reading.values);
  const double mu = spec.detector_mu * ref;
  const double sigma = spec.detector_sigma * ref;
  for (double& v : reading.values) v += mu + sigma * rng.gaussian();
}

MultiTaskD2NN apply_phase_noise(const MultiTaskD2NN& model, const NoiseSpec& spec, Rng& rng) {
  spec.validate();
  MultiTaskD2NN out = model;
  if (spec.device_sigma == 0.0) return out;
  for (int i = 0; i < out.mask_count(); ++i)
    for (double& theta : out.mask(i).theta)
      theta = wrap_two_pi(theta + spec.device_sigma * rng.gaussian());
  return out;
}

MultiTaskD2NN apply_phase_noise(const MultiTaskD2NN& model, const NoiseSpec& spec) {
  Rng rng(mix_seed(spec.seed, kPhaseStream));
  return apply_phase_noise(model, spec, rng);
}

BeamSplitterSpec apply_splitter_noise(const BeamSplitterSpec& bs, const NoiseSpec& spec) {
  spec.validate();
  BeamSplitterSpec out{bs.transmitted + spec.splitter_epsilon,
                       bs.reflected - spec.splitter_epsilon};
  out.validate();
  return out;
}

int noisy_inference(const MultiTaskD2NN& model, const ComplexField& input,
                    const NoiseSpec& spec, const LabelCodec& codec) {
  spec.validate();
  const MultiTaskD2NN perturbed = apply_phase_noise(model, spec);
  ModelCache cache(perturbed);
  RealField intensity = forward_pass(perturbed, cache, input, nullptr, spec.splitter_epsilon);
  Rng det_rng(mix_seed(spec.seed, kDetectorStream));
  DetectorReading reading;
  if (spec.per_region) {
    reading = read(intensity, perturbed.layout);
    apply_detector_noise_per_region(reading, spec, det_rng);
  } else {
    apply_detector_noise(intensity, spec, det_rng);
    reading = read(intensity, perturbed.layout);
  }
  return decide(reading, codec);
}

std::vector<SweepRow> noise_sweep(const MultiTaskD2NN& model,
                                  const std::vector<Dataset>& test_sets,
                                  const std::vector<NoiseSpec>& grid, int repetitions,
                                  const EncodeOptions& enc, int threads) {
  if (grid.empty()) throw ValidationError("noise_sweep: empty grid");
  if (repetitions < 1) throw ValidationError("noise_sweep: repetitions must be >= 1");
  if (static_cast<int>(test_sets.size()) != model.arch.tasks)
    throw ValidationError("noise_sweep: need one test set per task");
  const PropagationSpec prop_spec = model.arch.propagation();

  std::vector<SweepRow> rows;
  for (const NoiseSpec& point : grid) {
    point.validate();
    for (int rep = 0; rep < repetitions; ++rep) {
      const uint64_t rep_seed = mix_seed(point.seed, 0x72657073ULL, rep);
      NoiseSpec draw = point;
      draw.seed = rep_seed;
      // one fabricated device per repetition
      Rng phase_rng(mix_seed(rep_seed, kPhaseStream));
      const MultiTaskD2NN perturbed = apply_phase_noise(model, draw, phase_rng);
      ModelCache cache(perturbed);

      for (int t = 0; t < model.arch.tasks; ++t) {
        const Dataset& ds = test_sets[t];
        const LabelCodec codec = codec_for_task(t, model.arch.tasks);
        constexpr size_t kChunk = 32;
        const size_t n_chunks = (ds.size() + kChunk - 1) / kChunk;
        std::vector<size_t> correct(n_chunks, 0);
        parallel_chunks(ds.size(), kChunk, threads, [&](size_t k, size_t begin, size_t end) {
          for (size_t i = begin; i < end; ++i) {
            ComplexField in =
                encode_input(ds.image(i), ds.image_rows, ds.image_cols, prop_spec, enc);
            RealField intensity =
                forward_pass(perturbed, cache, in, nullptr, draw.splitter_epsilon);
            Rng det_rng(mix_seed(rep_seed, kDetectorStream + static_cast<uint64_t>(t), i));
            DetectorReading reading;
            if (draw.per_region) {
              reading = read(intensity, perturbed.layout);
              apply_detector_noise_per_region(reading, draw, det_rng);
            } else {
              apply_detector_noise(intensity, draw, det_rng);
              reading = read(intensity, perturbed.layout);
            }
            if (decide(reading, codec) == static_cast<int>(ds.labels[i])) ++correct[k];
          }
        });
        const size_t total = std::accumulate(correct.begin(), correct.end(), size_t{0});
        rows.push_back({t, point.detector_sigma, point.device_sigma, point.splitter_epsilon,
                        rep_seed, static_cast<double>(total) / static_cast<double>(ds.size())});
      }
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "task,detector_sigma,device_sigma,splitter_epsilon,seed,accuracy\n";
  os.precision(12);
  for (const SweepRow& r : rows)
    os << r.task << ',' << r.detector_sigma << ',' << r.device_sigma << ','
       << r.splitter_epsilon << ',' << r.seed << ',' << r.accuracy << '\n';
  return os.str();
}

}  // namespace d2nn
