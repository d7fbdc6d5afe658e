#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "d2nn/parallel.hpp"
#include "d2nn/rng.hpp"
#include "d2nn/training.hpp"

namespace d2nn {
namespace {

Batch make_batch(const Dataset& ds, const std::vector<uint32_t>& order, size_t offset,
                 size_t count, const PropagationSpec& spec, const EncodeOptions& enc,
                 int threads) {
  Batch batch(count);
  parallel_chunks(count, 16, threads, [&](size_t, size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const uint32_t idx = order[offset + i];
      batch[i] = {encode_input(ds.image(idx), ds.image_rows, ds.image_cols, spec, enc),
                  static_cast<int>(ds.labels[idx])};
    }
  });
  return batch;
}

}  // namespace

double evaluate_accuracy(const MultiTaskD2NN& model, const ModelCache& cache,
                         const Dataset& ds, const LabelCodec& codec,
                         const EncodeOptions& enc, int threads) {
  if (ds.size() == 0) throw ValidationError("evaluate_accuracy: empty test set");
  const PropagationSpec spec = model.arch.propagation();
  constexpr size_t kChunk = 32;
  const size_t n_chunks = (ds.size() + kChunk - 1) / kChunk;
  std::vector<size_t> correct(n_chunks, 0);
  parallel_chunks(ds.size(), kChunk, threads, [&](size_t k, size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      ComplexField in = encode_input(ds.image(i), ds.image_rows, ds.image_cols, spec, enc);
      RealField intensity = forward_pass(model, cache, in, nullptr);
      if (decide(read(intensity, model.layout), codec) == static_cast<int>(ds.labels[i]))
        ++correct[k];
    }
  });
  const size_t total = std::accumulate(correct.begin(), correct.end(), size_t{0});
  return static_cast<double>(total) / static_cast<double>(ds.size());
}

TrainResult train(MultiTaskD2NN& model, const std::vector<TaskDataset>& data,
                  const TrainConfig& cfg, const EncodeOptions& enc, AdamState* adam,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  const int T = model.arch.tasks;
  if (static_cast<int>(data.size()) != T)
    throw ValidationError("train: need one dataset per task");
  for (const TaskDataset& td : data)
    if (td.train.size() < static_cast<size_t>(cfg.batch_size))
      throw ValidationError("train: training set smaller than one batch");
  if (cfg.update_rule == UpdateRule::paper_rule_sgd && T != 2)
    throw ValidationError("train: paper-rule-sgd supports two tasks only");

  const PropagationSpec spec = model.arch.propagation();
  AdamState local_state;
  if (cfg.update_rule == UpdateRule::adam_autograd && adam == nullptr) {
    local_state = AdamState::zeros_like(model);
    adam = &local_state;
  }

  size_t steps = SIZE_MAX;
  for (const TaskDataset& td : data)
    steps = std::min(steps, td.train.size() / static_cast<size_t>(cfg.batch_size));

  TrainResult result;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<std::vector<uint32_t>> order(T);
    for (int t = 0; t < T; ++t) {
      order[t].resize(data[t].train.size());
      std::iota(order[t].begin(), order[t].end(), 0u);
      Rng rng(mix_seed(cfg.seed, 0x73687566ULL + static_cast<uint64_t>(t), epoch));
      rng.shuffle(order[t]);
    }

    std::vector<double> loss_sums(T, 0.0);
    for (size_t step = 0; step < steps; ++step) {
      std::vector<Batch> batches(T);
      for (int t = 0; t < T; ++t)
        batches[t] = make_batch(data[t].train, order[t], step * cfg.batch_size,
                                cfg.batch_size, spec, enc, cfg.threads);
      LossReport report;
      if (cfg.update_rule == UpdateRule::adam_autograd) {
        GradientSet grads = backward(model, batches, cfg, &report);
        adam_step(model, grads, cfg, *adam);
      } else {
        GradientSet g1 = backward_task(model, 0, batches[0], cfg.threads);
        GradientSet g2 = backward_task(model, 1, batches[1], cfg.threads);
        total_loss(model, batches, cfg, &report);
        paper_rule_step(model, g1, g2, cfg);
      }
      if (!std::isfinite(report.total))
        throw std::runtime_error("train: loss diverged (non-finite) at epoch " +
                                 std::to_string(epoch) + " step " + std::to_string(step));
      for (int t = 0; t < T; ++t) loss_sums[t] += report.task_losses[t];
    }

    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.train_loss.resize(T);
    for (int t = 0; t < T; ++t)
      metrics.train_loss[t] = steps ? loss_sums[t] / static_cast<double>(steps) : 0.0;

    ModelCache cache(model);
    for (int t = 0; t < T; ++t)
      metrics.test_accuracy.push_back(evaluate_accuracy(
          model, cache, data[t].test, codec_for_task(t, T), enc, cfg.threads));
    metrics.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_epoch) on_epoch(metrics);
    result.epochs.push_back(std::move(metrics));
  }
  return result;
}

}  // namespace d2nn
