#pragma once

#include <string>
#include <vector>

#include "d2nn/model.hpp"
#include "d2nn/noise.hpp"
#include "d2nn/training.hpp"

namespace d2nn {

struct DataTaskConfig {
  std::string name;
  std::string train_images, train_labels;
  std::string test_images, test_labels;
};

/// Sweep grid: the cartesian product of the three axes, evaluated
/// `repetitions` times per point with derived seeds.
struct NoiseGridConfig {
  std::vector<double> detector_sigmas{0.0, 0.05, 0.1, 0.15, 0.2};
  std::vector<double> device_sigmas{0.0, 0.1, 0.2, 0.3};
  std::vector<double> splitter_epsilons{0.0};
  double detector_mu = 0.0;
  int repetitions = 10;
  uint64_t seed = 7;
  bool per_region = false;

  std::vector<NoiseSpec> points() const;
  void validate() const;
};

/// The declarative run description consumed by every CLI command. Unknown JSON
/// keys are hard errors; all validation failures are reported together.
struct RunConfig {
  ModelArch arch;
  TrainConfig train;
  std::vector<DataTaskConfig> data;
  EncodeOptions encode;
  NoiseGridConfig noise;
  std::string output_dir = "out";

  void validate(bool check_paths = true) const;
};

RunConfig parse_run_config(const std::string& path);
RunConfig parse_run_config_text(const std::string& text, const std::string& origin);

/// Canonical serialization (sorted keys); basis of the config hash recorded in
/// checkpoints.
std::string canonical_config_json(const RunConfig& cfg);
uint64_t config_hash(const RunConfig& cfg);

}  // namespace d2nn
