#include <doctest.h>

#include "d2nn/noise.hpp"
#include "d2nn/training.hpp"
#include "test_util.hpp"

using namespace d2nn;
using test::random_field;

namespace {

ModelArch small_arch() {
  ModelArch a;
  a.grid_rows = a.grid_cols = 20;
  a.init_seed = 8;
  return a;
}

Dataset synthetic_dataset(int n, uint64_t seed) {
  Dataset ds;
  ds.split = "test";
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    for (int p = 0; p < 28 * 28; ++p)
      ds.images.push_back(static_cast<uint8_t>(rng.below(256)));
    ds.labels.push_back(static_cast<uint8_t>(rng.below(10)));
  }
  return ds;
}

}  // namespace

TEST_CASE("all-zero noise spec is the exact identity") {
  MultiTaskD2NN model = build_model(small_arch());
  Rng rng(42);
  ComplexField u = random_field(20, 20, rng);

  NoiseSpec zero;
  RealField clean = forward(model, u);
  RealField noised = clean;
  Rng nrng(1);
  apply_detector_noise(noised, zero, nrng);
  CHECK(noised.data == clean.data);

  MultiTaskD2NN same = apply_phase_noise(model, zero);
  for (int i = 0; i < model.mask_count(); ++i)
    CHECK(same.mask(i).theta == model.mask(i).theta);

  CHECK(apply_splitter_noise(model.splitter, zero).transmitted == 0.5);

  const int clean_class = decide(read(clean, model.layout), codec_for_task(1, 2));
  CHECK(noisy_inference(model, u, zero, codec_for_task(1, 2)) == clean_class);
}

TEST_CASE("a pure mean offset never changes a decision") {
  MultiTaskD2NN model = build_model(small_arch());
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    ComplexField u = random_field(20, 20, rng);
    RealField img = forward(model, u);
    NoiseSpec mu_only;
    mu_only.detector_mu = 0.8;
    RealField offset = img;
    Rng nrng(3);
    apply_detector_noise(offset, mu_only, nrng);
    for (int t = 0; t < 2; ++t) {
      const LabelCodec codec = codec_for_task(t, 2);
      CHECK(decide(read(img, model.layout), codec) == decide(read(offset, model.layout), codec));
    }
  }
}

TEST_CASE("detector noise is reproducible for a fixed seed") {
  RealField img(20, 20);
  for (double& v : img.data) v = 1.0;
  NoiseSpec spec;
  spec.detector_sigma = 0.1;
  spec.seed = 77;
  RealField a = img, b = img;
  Rng ra(spec.seed), rb(spec.seed);
  apply_detector_noise(a, spec, ra);
  apply_detector_noise(b, spec, rb);
  CHECK(a.data == b.data);
  // and actually perturbs
  CHECK(a.data != img.data);
}

TEST_CASE("phase noise of width zero or a full turn leaves the forward output alone") {
  MultiTaskD2NN model = build_model(small_arch());
  Rng rng(15);
  ComplexField u = random_field(20, 20, rng);
  RealField clean = forward(model, u);

  NoiseSpec zero;
  MultiTaskD2NN same = apply_phase_noise(model, zero);
  RealField again = forward(same, u);
  for (size_t i = 0; i < clean.size(); ++i)
    CHECK(again.data[i] == doctest::Approx(clean.data[i]).epsilon(1e-12).scale(1.0));

  MultiTaskD2NN turned = model;
  for (int i = 0; i < turned.mask_count(); ++i)
    for (double& t : turned.mask(i).theta) t += 2.0 * kPi;
  RealField wrapped = forward(turned, u);
  for (size_t i = 0; i < clean.size(); ++i)
    CHECK(wrapped.data[i] == doctest::Approx(clean.data[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("phase noise stays within [0, 2 pi) and is seed-deterministic") {
  MultiTaskD2NN model = build_model(small_arch());
  NoiseSpec spec;
  spec.device_sigma = 0.25;
  spec.seed = 5;
  MultiTaskD2NN a = apply_phase_noise(model, spec);
  MultiTaskD2NN b = apply_phase_noise(model, spec);
  for (int i = 0; i < a.mask_count(); ++i) {
    CHECK(a.mask(i).theta == b.mask(i).theta);
    for (double t : a.mask(i).theta) {
      CHECK(t >= 0.0);
      CHECK(t < 2.0 * kPi);
    }
  }
}

TEST_CASE("splitter perturbation examples") {
  BeamSplitterSpec nominal{0.5, 0.5};
  NoiseSpec spec;
  spec.splitter_epsilon = 0.1;
  BeamSplitterSpec plus = apply_splitter_noise(nominal, spec);
  CHECK(plus.transmitted == doctest::Approx(0.6));
  CHECK(plus.reflected == doctest::Approx(0.4));
  spec.splitter_epsilon = -0.1;
  BeamSplitterSpec minus = apply_splitter_noise(nominal, spec);
  CHECK(minus.transmitted == doctest::Approx(0.4));
  CHECK(minus.reflected == doctest::Approx(0.6));
  spec.splitter_epsilon = 0.2;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
}

TEST_CASE("noisy_inference is deterministic per spec seed") {
  MultiTaskD2NN model = build_model(small_arch());
  Rng rng(9);
  ComplexField u = random_field(20, 20, rng);
  NoiseSpec spec;
  spec.detector_sigma = 0.1;
  spec.device_sigma = 0.1;
  spec.splitter_epsilon = 0.05;
  spec.seed = 1234;
  const int a = noisy_inference(model, u, spec, codec_for_task(0, 2));
  const int b = noisy_inference(model, u, spec, codec_for_task(0, 2));
  CHECK(a == b);
}

TEST_CASE("zero-noise sweep row reproduces the clean accuracy exactly") {
  MultiTaskD2NN model = build_model(small_arch());
  std::vector<Dataset> tests = {synthetic_dataset(24, 1), synthetic_dataset(24, 2)};
  EncodeOptions enc;

  std::vector<NoiseSpec> grid = {NoiseSpec{}};
  const auto rows = noise_sweep(model, tests, grid, 1, enc, 2);
  REQUIRE(rows.size() == 2);  // |grid| x tasks

  ModelCache cache(model);
  for (const SweepRow& row : rows) {
    const double clean = evaluate_accuracy(model, cache, tests[row.task],
                                           codec_for_task(row.task, 2), enc, 2);
    CHECK(row.accuracy == clean);
  }
}

TEST_CASE("sweep output is deterministic and row-structured") {
  MultiTaskD2NN model = build_model(small_arch());
  std::vector<Dataset> tests = {synthetic_dataset(16, 3), synthetic_dataset(16, 4)};
  EncodeOptions enc;
  std::vector<NoiseSpec> grid;
  for (double s : {0.0, 0.1}) {
    NoiseSpec p;
    p.detector_sigma = s;
    p.seed = 10;
    grid.push_back(p);
  }
  const auto rows1 = noise_sweep(model, tests, grid, 3, enc, 1);
  const auto rows2 = noise_sweep(model, tests, grid, 3, enc, 4);
  REQUIRE(rows1.size() == grid.size() * 3 * 2);
  for (size_t i = 0; i < rows1.size(); ++i) {
    CHECK(rows1[i].accuracy == rows2[i].accuracy);
    CHECK(rows1[i].seed == rows2[i].seed);
  }
  CHECK_THROWS_AS(noise_sweep(model, tests, {}, 1, enc, 1), ValidationError);
}

TEST_CASE("per-region detector noise mode perturbs the reading directly") {
  DetectorReading r{{1, 1, 1, 1, 1, 1, 1, 1, 1, 1}};
  NoiseSpec spec;
  spec.detector_sigma = 0.2;
  spec.per_region = true;
  Rng rng(6);
  DetectorReading noised = r;
  apply_detector_noise_per_region(noised, spec, rng);
  CHECK(noised.values != r.values);
}
