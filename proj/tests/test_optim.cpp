#include <doctest.h>

#include "d2nn/training.hpp"
#include "test_util.hpp"

using namespace d2nn;
using test::random_field;

namespace {

ModelArch tiny_arch() {
  ModelArch a;
  a.grid_rows = a.grid_cols = 16;
  a.shared_layers = 1;
  a.branch_layers = 1;
  a.init_seed = 5;
  for (int row : {2, 10})
    for (int col : {1, 4, 7, 10, 13}) a.custom_regions.push_back({row, col, 2, 2});
  return a;
}

}  // namespace

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  MultiTaskD2NN model = build_model(tiny_arch());
  MultiTaskD2NN before = model;
  AdamState state = AdamState::zeros_like(model);
  GradientSet zeros = GradientSet::zeros_like(model);
  TrainConfig cfg;
  adam_step(model, zeros, cfg, state);
  for (int i = 0; i < model.mask_count(); ++i)
    CHECK(model.mask(i).theta == before.mask(i).theta);
}

TEST_CASE("adam first step moves each parameter by about eta against the gradient sign") {
  MultiTaskD2NN model = build_model(tiny_arch());
  MultiTaskD2NN before = model;
  AdamState state = AdamState::zeros_like(model);
  GradientSet g = GradientSet::zeros_like(model);
  Rng rng(7);
  for (auto& m : g.masks)
    for (double& v : m) v = rng.uniform(-1.0, 1.0);
  TrainConfig cfg;
  adam_step(model, g, cfg, state);
  for (int i = 0; i < model.mask_count(); ++i)
    for (size_t j = 0; j < g.masks[i].size(); ++j) {
      const double delta = model.mask(i).theta[j] - before.mask(i).theta[j];
      const double grad = g.masks[i][j];
      if (std::abs(grad) > 1e-3) {
        CHECK(delta * grad < 0.0);  // opposite sign
        CHECK(std::abs(delta) == doctest::Approx(cfg.eta).epsilon(1e-4));
      }
    }
}

TEST_CASE("adam trajectories are bit-identical across reruns") {
  auto run = [&] {
    MultiTaskD2NN model = build_model(tiny_arch());
    AdamState state = AdamState::zeros_like(model);
    TrainConfig cfg;
    Rng rng(99);
    for (int step = 0; step < 10; ++step) {
      GradientSet g = GradientSet::zeros_like(model);
      for (auto& m : g.masks)
        for (double& v : m) v = rng.uniform(-0.5, 0.5);
      adam_step(model, g, cfg, state);
    }
    return model;
  };
  MultiTaskD2NN a = run(), b = run();
  for (int i = 0; i < a.mask_count(); ++i) CHECK(a.mask(i).theta == b.mask(i).theta);
}

TEST_CASE("printed update rule: no-op without gradients or penalty") {
  MultiTaskD2NN model = build_model(tiny_arch());
  MultiTaskD2NN before = model;
  GradientSet zeros = GradientSet::zeros_like(model);
  TrainConfig cfg;
  cfg.lambda_l2 = 0.0;
  paper_rule_step(model, zeros, zeros, cfg);
  for (int i = 0; i < model.mask_count(); ++i)
    CHECK(model.mask(i).theta == before.mask(i).theta);
}

TEST_CASE("printed update rule: shared masks move by -eta/2 times the gradient sum") {
  MultiTaskD2NN model = build_model(tiny_arch());
  MultiTaskD2NN before = model;
  GradientSet g1 = GradientSet::zeros_like(model), g2 = GradientSet::zeros_like(model);
  Rng rng(11);
  for (double& v : g1.masks[0]) v = rng.uniform(-1, 1);
  for (double& v : g2.masks[0]) v = rng.uniform(-1, 1);
  TrainConfig cfg;
  cfg.lambda1 = cfg.lambda2 = 1.0;  // ratio 1
  cfg.lambda_l2 = 0.0;
  paper_rule_step(model, g1, g2, cfg);
  for (size_t j = 0; j < model.shared[0].size(); ++j)
    CHECK(model.shared[0].theta[j] ==
          doctest::Approx(before.shared[0].theta[j] -
                          0.5 * cfg.eta * (g1.masks[0][j] + g2.masks[0][j]))
              .epsilon(1e-12));
}

TEST_CASE("printed update rule: penalty vanishes for opposite branch masks") {
  MultiTaskD2NN model = build_model(tiny_arch());
  for (size_t j = 0; j < model.branches[0][0].size(); ++j)
    model.branches[1][0].theta[j] = -model.branches[0][0].theta[j];
  MultiTaskD2NN before = model;
  GradientSet zeros = GradientSet::zeros_like(model);
  TrainConfig cfg;
  cfg.lambda_l2 = 0.5;
  paper_rule_step(model, zeros, zeros, cfg);
  for (int i = 0; i < model.mask_count(); ++i)
    CHECK(model.mask(i).theta == before.mask(i).theta);
}

TEST_CASE("printed update rule requires the two-task system") {
  ModelArch a = tiny_arch();
  a.tasks = 4;
  a.detector_sub_split = 2;
  MultiTaskD2NN model = build_model(a);
  GradientSet zeros = GradientSet::zeros_like(model);
  TrainConfig cfg;
  CHECK_THROWS_AS(paper_rule_step(model, zeros, zeros, cfg), ValidationError);
}

TEST_CASE("config validation rejects non-positive weights") {
  TrainConfig cfg;
  cfg.lambda1 = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = TrainConfig{};
  cfg.eta = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = TrainConfig{};
  cfg.adam_beta1 = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
