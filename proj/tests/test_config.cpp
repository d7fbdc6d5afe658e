#include <doctest.h>

#include "d2nn/config.hpp"

using namespace d2nn;

namespace {

const char* kMinimal = R"({
  "architecture": {"grid_rows": 100, "grid_cols": 100},
  "training": {"eta": 0.02, "epochs": 5},
  "output_dir": "out"
})";

}  // namespace

TEST_CASE("minimal config parses with defaults filled in") {
  RunConfig cfg = parse_run_config_text(kMinimal, "test");
  CHECK(cfg.arch.grid_rows == 100);
  CHECK(cfg.arch.shared_layers == 4);
  CHECK(cfg.arch.tasks == 2);
  CHECK(cfg.train.eta == 0.02);
  CHECK(cfg.train.epochs == 5);
  CHECK(cfg.train.update_rule == UpdateRule::adam_autograd);
  CHECK(cfg.output_dir == "out");
  cfg.validate(false);
}

TEST_CASE("unknown keys are hard errors") {
  CHECK_THROWS_WITH_AS(
      parse_run_config_text(R"({"architecture": {"grid_rowz": 100}})", "test"),
      doctest::Contains("unknown key \"grid_rowz\""), ValidationError);
  CHECK_THROWS_WITH_AS(parse_run_config_text(R"({"otput_dir": "x"})", "test"),
                       doctest::Contains("unknown key"), ValidationError);
  CHECK_THROWS_WITH_AS(
      parse_run_config_text(R"({"noise": {"detector_sigma": [0.1]}})", "test"),
      doctest::Contains("unknown key \"detector_sigma\""), ValidationError);
}

TEST_CASE("validation failures are aggregated and reported together") {
  RunConfig cfg = parse_run_config_text(kMinimal, "test");
  cfg.train.lambda1 = 0.0;
  cfg.arch.grid_rows = 33;  // odd
  try {
    cfg.validate(false);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("lambda1") != std::string::npos);
    CHECK(msg.find("even") != std::string::npos);
  }
}

TEST_CASE("missing data paths are validation errors") {
  RunConfig cfg = parse_run_config_text(kMinimal, "test");
  cfg.data.push_back({"a", "/nonexistent/im", "/nonexistent/lb", "/nonexistent/ti",
                      "/nonexistent/tl"});
  cfg.data.push_back({"b", "/nonexistent/im", "/nonexistent/lb", "/nonexistent/ti",
                      "/nonexistent/tl"});
  CHECK_THROWS_WITH_AS(cfg.validate(true), doctest::Contains("does not exist"),
                       ValidationError);
  cfg.validate(false);  // path checks disabled
}

TEST_CASE("noise grid presets respect the plotted ranges") {
  RunConfig cfg = parse_run_config_text(kMinimal, "test");
  cfg.noise.detector_sigmas = {0.0, 0.5};
  CHECK_THROWS_AS(cfg.validate(false), ValidationError);
  cfg.noise = {};
  cfg.noise.splitter_epsilons = {0.2};
  CHECK_THROWS_AS(cfg.validate(false), ValidationError);
}

TEST_CASE("noise grid expands to the cartesian product") {
  NoiseGridConfig grid;
  grid.detector_sigmas = {0.0, 0.1};
  grid.device_sigmas = {0.0, 0.2};
  grid.splitter_epsilons = {-0.1, 0.0, 0.1};
  CHECK(grid.points().size() == 12);
}

TEST_CASE("splitter mode shortcuts") {
  RunConfig cfg = parse_run_config_text(
      R"({"architecture": {"splitter": {"mode": "physical"}}})", "test");
  CHECK(cfg.arch.splitter_transmitted == doctest::Approx(1.0 / std::sqrt(2.0)));
  RunConfig cfg2 = parse_run_config_text(
      R"({"architecture": {"splitter": {"mode": "amplitude-half"}}})", "test");
  CHECK(cfg2.arch.splitter_transmitted == 0.5);
}

TEST_CASE("config hash is stable and sensitive") {
  RunConfig a = parse_run_config_text(kMinimal, "test");
  RunConfig b = parse_run_config_text(kMinimal, "test");
  CHECK(config_hash(a) == config_hash(b));
  b.train.eta = 0.5;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("invalid JSON names the origin") {
  CHECK_THROWS_WITH_AS(parse_run_config_text("{nope", "cfg.json"),
                       doctest::Contains("cfg.json"), ValidationError);
}
