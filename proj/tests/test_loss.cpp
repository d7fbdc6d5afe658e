#include <doctest.h>

#include <cmath>

#include "d2nn/loss.hpp"
#include "d2nn/rng.hpp"

using namespace d2nn;

TEST_CASE("uniform reading against a one-hot target has the closed-form loss") {
  DetectorReading uniform{std::vector<double>(10, 3.7)};
  std::vector<double> one_hot(10, 0.0);
  one_hot[4] = 1.0;
  const double ln10 = std::log(10.0);
  const double expected = (9.0 * ln10 * ln10 + (ln10 + 1.0) * (ln10 + 1.0)) / 10.0;
  CHECK(task_loss(uniform, one_hot) == doctest::Approx(expected).epsilon(1e-12));

  // reversed one-hot (one 0, nine 1s): mean over classes of (-ln10 - t_i)^2
  std::vector<double> reversed(10, 1.0);
  reversed[4] = 0.0;
  const double expected_rev = (ln10 * ln10 + 9.0 * (ln10 + 1.0) * (ln10 + 1.0)) / 10.0;
  CHECK(task_loss(uniform, reversed) == doctest::Approx(expected_rev).epsilon(1e-12));
}

TEST_CASE("loss is invariant under constant reading offsets") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    DetectorReading r;
    for (int i = 0; i < 10; ++i) r.values.push_back(rng.uniform(0.0, 5.0));
    std::vector<double> target(10, 0.0);
    target[rng.below(10)] = 1.0;
    DetectorReading shifted = r;
    const double c = rng.uniform(-3.0, 3.0);
    for (double& v : shifted.values) v += c;
    CHECK(task_loss(r, target) ==
          doctest::Approx(task_loss(shifted, target)).epsilon(1e-12));
  }
}

TEST_CASE("empty or mismatched readings are rejected") {
  DetectorReading empty;
  CHECK_THROWS_AS(task_loss(empty, {}), ValidationError);
  DetectorReading r{{1, 2, 3}};
  CHECK_THROWS_AS(task_loss(r, {0.0, 1.0}), ValidationError);
}

TEST_CASE("analytic reading gradient matches finite differences") {
  Rng rng(17);
  DetectorReading r;
  for (int i = 0; i < 10; ++i) r.values.push_back(rng.uniform(0.0, 2.0));
  std::vector<double> target(10, 1.0);
  target[3] = 0.0;

  const std::vector<double> g = task_loss_grad(r, target);
  const double h = 1e-7;
  for (int i = 0; i < 10; ++i) {
    DetectorReading up = r, dn = r;
    up.values[i] += h;
    dn.values[i] -= h;
    const double fd = (task_loss(up, target) - task_loss(dn, target)) / (2 * h);
    CHECK(g[i] == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("log_softmax normalizes") {
  std::vector<double> l = log_softmax({1.0, 2.0, 3.0});
  double sum = 0.0;
  for (double v : l) sum += std::exp(v);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}
