// Command-line driver: train / eval / sweep / visualize / report.
// Exit codes: 0 success, 1 validation error, 2 runtime error.

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "d2nn/checkpoint.hpp"
#include "d2nn/config.hpp"
#include "d2nn/efficiency.hpp"
#include "d2nn/kernels.hpp"
#include "d2nn/noise.hpp"
#include "d2nn/pgm.hpp"
#include "d2nn/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::string checkpoint_path;
  std::string out_dir;
  uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
};

/// Serializes concurrent CLI invocations that share one output directory.
class OutputLock {
 public:
  explicit OutputLock(const std::string& dir) {
    fs::create_directories(dir);
    path_ = (fs::path(dir) / ".lock").string();
    fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ >= 0) ::flock(fd_, LOCK_EX);
  }
  ~OutputLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }

 private:
  std::string path_;
  int fd_ = -1;
};

d2nn::RunConfig load_config(GlobalOptions& opts, bool check_paths = true) {
  if (opts.config_path.empty()) throw d2nn::ValidationError("--config is required");
  d2nn::RunConfig cfg = d2nn::parse_run_config(opts.config_path);
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  if (opts.seed_set) {
    cfg.train.seed = opts.seed;
    cfg.noise.seed = opts.seed;
    cfg.arch.init_seed = opts.seed;
  }
  if (opts.threads > 0) cfg.train.threads = opts.threads;
  cfg.validate(check_paths);
  return cfg;
}

std::vector<d2nn::TaskDataset> load_datasets(const d2nn::RunConfig& cfg) {
  if (cfg.data.empty())
    throw d2nn::ValidationError("config has no data.tasks block");
  std::vector<d2nn::TaskDataset> out;
  for (size_t t = 0; t < cfg.data.size(); ++t) {
    const d2nn::DataTaskConfig& d = cfg.data[t];
    d2nn::TaskDataset td;
    td.name = d.name.empty() ? ("task" + std::to_string(t)) : d.name;
    td.train = d2nn::load_idx(d.train_images, d.train_labels);
    td.train.task_id = static_cast<int>(t);
    td.train.split = "train";
    td.test = d2nn::load_idx(d.test_images, d.test_labels);
    td.test.task_id = static_cast<int>(t);
    td.test.split = "test";
    out.push_back(std::move(td));
  }
  return out;
}

json metrics_to_json(const d2nn::EpochMetrics& m) {
  return json{{"epoch", m.epoch},
              {"train_loss", m.train_loss},
              {"test_accuracy", m.test_accuracy},
              {"wall_seconds", m.wall_seconds}};
}

int cmd_train(GlobalOptions& opts) {
  d2nn::RunConfig cfg = load_config(opts);
  std::vector<d2nn::TaskDataset> data = load_datasets(cfg);
  OutputLock lock(cfg.output_dir);

  d2nn::MultiTaskD2NN model = d2nn::build_model(cfg.arch);
  d2nn::AdamState adam = d2nn::AdamState::zeros_like(model);

  std::ofstream jsonl(fs::path(cfg.output_dir) / "metrics.jsonl", std::ios::trunc);
  d2nn::TrainResult result = d2nn::train(
      model, data, cfg.train, cfg.encode, &adam, [&](const d2nn::EpochMetrics& m) {
        jsonl << metrics_to_json(m).dump() << "\n";
        jsonl.flush();
        std::cout << "epoch " << m.epoch;
        for (size_t t = 0; t < m.test_accuracy.size(); ++t)
          std::cout << "  " << data[t].name << ": loss=" << m.train_loss[t]
                    << " acc=" << m.test_accuracy[t];
        std::cout << "  (" << m.wall_seconds << "s)" << std::endl;
      });

  const std::string ckpt_path = (fs::path(cfg.output_dir) / "checkpoint.d2nn").string();
  d2nn::CheckpointMeta meta{cfg.train.epochs, cfg.train.update_rule, d2nn::config_hash(cfg)};
  d2nn::save_checkpoint(model, &adam, meta, ckpt_path);

  json summary;
  summary["checkpoint"] = ckpt_path;
  summary["epochs"] = cfg.train.epochs;
  summary["update_rule"] = d2nn::update_rule_name(cfg.train.update_rule);
  summary["config_hash"] = d2nn::config_hash(cfg);
  summary["kernel_backend"] = d2nn::kernels::backend_name();
  if (!result.epochs.empty()) {
    summary["final_test_accuracy"] = result.epochs.back().test_accuracy;
    summary["final_train_loss"] = result.epochs.back().train_loss;
  }
  std::ofstream(fs::path(cfg.output_dir) / "summary.json") << summary.dump(2) << "\n";
  std::cout << "checkpoint written to " << ckpt_path << std::endl;
  return 0;
}

int cmd_eval(GlobalOptions& opts) {
  if (opts.checkpoint_path.empty()) throw d2nn::ValidationError("--checkpoint is required");
  d2nn::RunConfig cfg = load_config(opts);
  std::vector<d2nn::TaskDataset> data = load_datasets(cfg);
  d2nn::Checkpoint ckpt = d2nn::load_checkpoint(opts.checkpoint_path);
  OutputLock lock(cfg.output_dir);

  d2nn::ModelCache cache(ckpt.model);
  json out;
  for (size_t t = 0; t < data.size(); ++t) {
    const double acc = d2nn::evaluate_accuracy(
        ckpt.model, cache, data[t].test, d2nn::codec_for_task(static_cast<int>(t), ckpt.model.arch.tasks),
        cfg.encode, cfg.train.threads);
    out[data[t].name] = acc;
    std::cout << data[t].name << " accuracy: " << acc << std::endl;
  }
  std::ofstream(fs::path(cfg.output_dir) / "eval.json") << out.dump(2) << "\n";
  return 0;
}

void write_sweep_heatmaps(const std::vector<d2nn::SweepRow>& rows,
                          const d2nn::NoiseGridConfig& grid, int tasks,
                          const std::string& dir) {
  // mean accuracy per (task, det, dev, eps)
  std::map<std::tuple<int, double, double, double>, std::pair<double, int>> agg;
  for (const auto& r : rows) {
    auto& slot = agg[{r.task, r.detector_sigma, r.device_sigma, r.splitter_epsilon}];
    slot.first += r.accuracy;
    slot.second += 1;
  }
  auto mean_at = [&](int task, double det, double dev, double eps) {
    const auto& slot = agg.at({task, det, dev, eps});
    return slot.first / slot.second;
  };

  struct Axis {
    std::string name;
    const std::vector<double>* values;
  };
  const Axis det{"det", &grid.detector_sigmas};
  const Axis dev{"dev", &grid.device_sigmas};
  const Axis eps{"eps", &grid.splitter_epsilons};
  struct Pair {
    Axis rows_axis, cols_axis;
    double fixed;  // first value of the remaining axis
    int which;     // 0: eps fixed, 1: dev fixed, 2: det fixed
  };
  const std::vector<Pair> pairs = {{det, dev, grid.splitter_epsilons.front(), 0},
                                   {det, eps, grid.device_sigmas.front(), 1},
                                   {dev, eps, grid.detector_sigmas.front(), 2}};

  for (int t = 0; t < tasks; ++t) {
    for (const Pair& p : pairs) {
      if (p.rows_axis.values->size() < 2 || p.cols_axis.values->size() < 2) continue;
      d2nn::RealField img(static_cast<int>(p.rows_axis.values->size()),
                          static_cast<int>(p.cols_axis.values->size()));
      for (size_t i = 0; i < p.rows_axis.values->size(); ++i)
        for (size_t j = 0; j < p.cols_axis.values->size(); ++j) {
          const double a = (*p.rows_axis.values)[i];
          const double b = (*p.cols_axis.values)[j];
          double v = 0.0;
          if (p.which == 0) v = mean_at(t, a, b, p.fixed);
          if (p.which == 1) v = mean_at(t, a, p.fixed, b);
          if (p.which == 2) v = mean_at(t, p.fixed, a, b);
          img.at(static_cast<int>(i), static_cast<int>(j)) = v;
        }
      const std::string name = "sweep_task" + std::to_string(t) + "_" + p.rows_axis.name +
                               "_x_" + p.cols_axis.name + ".pgm";
      d2nn::write_pgm((fs::path(dir) / name).string(), img);
    }
  }
}

int cmd_sweep(GlobalOptions& opts) {
  if (opts.checkpoint_path.empty()) throw d2nn::ValidationError("--checkpoint is required");
  d2nn::RunConfig cfg = load_config(opts);
  std::vector<d2nn::TaskDataset> data = load_datasets(cfg);
  d2nn::Checkpoint ckpt = d2nn::load_checkpoint(opts.checkpoint_path);
  OutputLock lock(cfg.output_dir);

  std::vector<d2nn::Dataset> tests;
  for (auto& td : data) tests.push_back(td.test);
  const std::vector<d2nn::SweepRow> rows =
      d2nn::noise_sweep(ckpt.model, tests, cfg.noise.points(), cfg.noise.repetitions,
                        cfg.encode, cfg.train.threads);
  std::ofstream(fs::path(cfg.output_dir) / "sweep.csv") << d2nn::sweep_csv(rows);
  write_sweep_heatmaps(rows, cfg.noise, ckpt.model.arch.tasks, cfg.output_dir);
  std::cout << "sweep wrote " << rows.size() << " rows to " << cfg.output_dir << "/sweep.csv"
            << std::endl;
  return 0;
}

int cmd_visualize(GlobalOptions& opts, int sample, int task) {
  if (opts.checkpoint_path.empty()) throw d2nn::ValidationError("--checkpoint is required");
  d2nn::RunConfig cfg = load_config(opts);
  std::vector<d2nn::TaskDataset> data = load_datasets(cfg);
  d2nn::Checkpoint ckpt = d2nn::load_checkpoint(opts.checkpoint_path);
  OutputLock lock(cfg.output_dir);

  if (task < 0 || task >= static_cast<int>(data.size()))
    throw d2nn::ValidationError("--task out of range");
  const d2nn::Dataset& ds = data[task].test;
  if (sample < 0 || static_cast<size_t>(sample) >= ds.size())
    throw d2nn::ValidationError("--sample out of range");

  d2nn::ComplexField in = d2nn::encode_input(ds.image(sample), ds.image_rows, ds.image_cols,
                                             ckpt.model.arch.propagation(), cfg.encode);
  d2nn::ForwardTrace trace = d2nn::forward_trace(ckpt.model, in);
  const std::string prefix = data[task].name + "_sample" + std::to_string(sample);
  const auto paths = d2nn::export_trace(trace, cfg.output_dir, prefix);

  d2nn::DetectorReading reading = d2nn::read(trace.intensity, ckpt.model.layout);
  std::ofstream csv(fs::path(cfg.output_dir) / (prefix + "_reading.csv"));
  csv << "cell,value\n";
  csv.precision(12);
  for (size_t i = 0; i < reading.values.size(); ++i) csv << i << ',' << reading.values[i] << '\n';

  const int predicted =
      d2nn::decide(reading, d2nn::codec_for_task(task, ckpt.model.arch.tasks));
  std::cout << "label " << static_cast<int>(ds.labels[sample]) << ", predicted " << predicted
            << ", " << paths.size() << " stage images in " << cfg.output_dir << std::endl;
  return 0;
}

int cmd_report(const std::vector<double>& acc_single, const std::vector<double>& acc_multi,
               int det_multi, int det_single_total, std::vector<std::string> names,
               const std::string& out_dir) {
  if (names.empty())
    for (size_t t = 0; t < acc_multi.size(); ++t) names.push_back("task" + std::to_string(t));
  const d2nn::EfficiencyReport report =
      d2nn::make_efficiency_report(names, acc_single, acc_multi, det_multi, det_single_total);
  std::cout << "task  acc_single  acc_multi  acc_hw\n";
  for (size_t t = 0; t < report.task_names.size(); ++t) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-8s %8.4f %9.4f %7.2fx", report.task_names[t].c_str(),
                  report.acc_single[t], report.acc_multi[t], report.acc_hw_values[t]);
    std::cout << line << "\n";
  }
  if (!out_dir.empty()) {
    OutputLock lock(out_dir);
    std::ofstream(fs::path(out_dir) / "report.json") << d2nn::efficiency_report_json(report)
                                                     << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-task diffractive optical network simulator and trainer"};
  app.require_subcommand(1);

  GlobalOptions opts;
  auto add_common = [&](CLI::App* sub, bool needs_checkpoint) {
    sub->add_option("--config", opts.config_path, "JSON run configuration");
    if (needs_checkpoint)
      sub->add_option("--checkpoint", opts.checkpoint_path, "model checkpoint path");
    sub->add_option("--out", opts.out_dir, "output directory (overrides config)");
    sub->add_option("--seed", opts.seed, "seed override")->each([&](const std::string&) {
      opts.seed_set = true;
    });
    sub->add_option("--threads", opts.threads, "worker thread count");
  };

  CLI::App* train = app.add_subcommand("train", "train a model from a run config");
  add_common(train, false);
  CLI::App* eval = app.add_subcommand("eval", "clean per-task test accuracy of a checkpoint");
  add_common(eval, true);
  CLI::App* sweep = app.add_subcommand("sweep", "noise-robustness sweep over the config grid");
  add_common(sweep, true);

  CLI::App* visualize = app.add_subcommand("visualize", "export per-stage field heatmaps");
  add_common(visualize, true);
  int sample = 0, task = 0;
  visualize->add_option("--sample", sample, "test-set sample index");
  visualize->add_option("--task", task, "task index the sample belongs to");

  CLI::App* report = app.add_subcommand("report", "hardware-efficiency report");
  std::vector<double> acc_single, acc_multi;
  int det_multi = 10, det_single_total = 20;
  std::vector<std::string> task_names;
  std::string report_out;
  report->add_option("--acc-single", acc_single, "single-task baseline accuracies")
      ->delimiter(',');
  report->add_option("--acc-multi", acc_multi, "multi-task accuracies")->delimiter(',');
  report->add_option("--det-multi", det_multi, "detectors in the multi-task system");
  report->add_option("--det-single-total", det_single_total,
                     "detectors summed over single-task systems");
  report->add_option("--tasks", task_names, "task names")->delimiter(',');
  report->add_option("--out", report_out, "output directory for report.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(opts);
    if (eval->parsed()) return cmd_eval(opts);
    if (sweep->parsed()) return cmd_sweep(opts);
    if (visualize->parsed()) return cmd_visualize(opts, sample, task);
    if (report->parsed())
      return cmd_report(acc_single, acc_multi, det_multi, det_single_total, task_names,
                        report_out);
  } catch (const d2nn::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 0;
}
