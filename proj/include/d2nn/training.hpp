#pragma once

#include <functional>
#include <optional>
#include <string>

#include "d2nn/dataset.hpp"
#include "d2nn/model.hpp"

namespace d2nn {

enum class UpdateRule { adam_autograd, paper_rule_sgd };

const char* update_rule_name(UpdateRule r);
UpdateRule update_rule_from_name(const std::string& name);

struct TrainConfig {
  double lambda1 = 1.0;        // task-1 loss weight
  double lambda2 = 1.0;        // task-2 loss weight
  double lambda_l2 = 1e-4;     // branch-mask quadratic penalty weight
  double eta = 0.01;           // learning rate
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int batch_size = 64;
  int epochs = 20;
  uint64_t seed = 1;
  UpdateRule update_rule = UpdateRule::adam_autograd;
  int threads = 0;  // 0 = hardware concurrency

  double lambda_ratio() const { return lambda2 / lambda1; }
  double task_weight(int task) const { return task == 0 ? lambda1 : (task == 1 ? lambda2 : 1.0); }
  void validate() const;
};

/// One encoded training example.
struct Example {
  ComplexField input;
  int label = 0;
};
using Batch = std::vector<Example>;

/// Real gradient grids mirroring the model's masks (canonical mask order).
struct GradientSet {
  std::vector<std::vector<double>> masks;

  static GradientSet zeros_like(const MultiTaskD2NN& model);
  void accumulate(const GradientSet& other);
  bool finite() const;
};

struct LossReport {
  double total = 0.0;
  std::vector<double> task_losses;  // mean per-sample loss per task (unweighted)
  double regularizer = 0.0;
};

/// Weighted multi-task objective:
///   lambda1 * L1 + lambda2 * L2 (+ further tasks at weight 1)
///   + lambda_l2 * (lambda2/lambda1) * sum of squares over branch masks.
/// task_batches must hold one batch per task.
double total_loss(const MultiTaskD2NN& model, const std::vector<Batch>& task_batches,
                  const TrainConfig& cfg, LossReport* report = nullptr);

/// Exact reverse-mode gradient of total_loss w.r.t. every mask. Per-sample
/// adjoint passes run in parallel over fixed-size chunks; partial gradients
/// are reduced in chunk order, so results are bit-identical for any thread
/// count. Throws on non-finite gradients, naming the mask.
GradientSet backward(const MultiTaskD2NN& model, const std::vector<Batch>& task_batches,
                     const TrainConfig& cfg, LossReport* report = nullptr);

/// Raw gradient of one task's mean loss (no lambda weight, no regularizer);
/// feeds the printed-rule update.
GradientSet backward_task(const MultiTaskD2NN& model, int task, const Batch& batch,
                          int threads);

struct AdamState {
  int64_t step = 0;
  std::vector<std::vector<double>> m, v;

  static AdamState zeros_like(const MultiTaskD2NN& model);
};

/// Standard Adam with bias correction on the canonical mask order.
void adam_step(MultiTaskD2NN& model, const GradientSet& grads, const TrainConfig& cfg,
               AdamState& state);

/// The alternative update rule, applied verbatim as printed (two tasks only):
///   shared:  theta -= eta/2 * (lambda2/lambda1) * (g1 + g2)
///   branch b: theta_b -= eta * g_b + 2 * eta * lambda_l2 * (theta_1 + theta_2)
/// where g_t is the raw gradient of task t's loss. This differs from the exact
/// gradient of the weighted objective; it exists as a faithfully preserved
/// mode, not the default.
void paper_rule_step(MultiTaskD2NN& model, const GradientSet& g_task1,
                     const GradientSet& g_task2, const TrainConfig& cfg);

struct TaskDataset {
  std::string name;
  Dataset train;
  Dataset test;
};

struct EpochMetrics {
  int epoch = 0;
  std::vector<double> train_loss;     // mean per-task loss over the epoch
  std::vector<double> test_accuracy;  // clean per-task test accuracy
  double wall_seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochMetrics> epochs;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

/// Interleaved mini-batch training: every optimizer step consumes one batch
/// per task and applies the summed weighted loss. Deterministic for fixed
/// seed, data, and thread-count-independent by construction.
TrainResult train(MultiTaskD2NN& model, const std::vector<TaskDataset>& data,
                  const TrainConfig& cfg, const EncodeOptions& enc,
                  AdamState* adam = nullptr, const EpochCallback& on_epoch = {});

double evaluate_accuracy(const MultiTaskD2NN& model, const ModelCache& cache,
                         const Dataset& ds, const LabelCodec& codec,
                         const EncodeOptions& enc, int threads);

}  // namespace d2nn
