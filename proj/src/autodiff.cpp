#include <cmath>

#include "d2nn/kernels.hpp"
#include "d2nn/loss.hpp"
#include "d2nn/parallel.hpp"
#include "d2nn/training.hpp"

// Reverse-mode adjoints through the optical pipeline. Conventions: for a real
// loss L and complex node z, the adjoint carried here is
//   z_adj = dL/d(Re z) + j * dL/d(Im z).
// Under this convention:
//   propagate        ->  apply the conj(H) filter (propagate_adjoint)
//   modulate by e^j0 ->  input adjoint u * conj(phasor); d L / d theta[i] =
//                        Im(conj(output[i]) * u[i])
//   intensity |z|^2  ->  2 * upstream * z  (upstream real)
//   split / combine  ->  real scaling / fan-in duplication

namespace d2nn {
namespace {

constexpr size_t kChunkSamples = 8;

struct SampleRef {
  int task;
  const Example* ex;
  double weight;  // loss-weight / batch-size factor applied to the adjoint seed
};

struct WorkerBuffers {
  ForwardTape tape;
  ComplexField zhat, u, xhat;
};

void backprop_sample(const MultiTaskD2NN& model, const ModelCache& cache,
                     const std::vector<Rect>& cells, const std::vector<double>& g_det,
                     WorkerBuffers& wb, GradientSet& acc) {
  const int S = static_cast<int>(model.shared.size());
  const int T = model.arch.tasks;
  const int B = model.arch.branch_layers;
  const auto amps = model.branch_amplitudes();
  const ComplexField& z = wb.tape.combined;

  // Seed: adjoint of the intensity image is g_det scattered over the readout
  // cells; pixels outside any cell carry zero adjoint.
  wb.zhat.rows = z.rows;
  wb.zhat.cols = z.cols;
  wb.zhat.data.assign(z.size(), cplx(0.0, 0.0));
  for (size_t i = 0; i < cells.size(); ++i) {
    const Rect& cell = cells[i];
    const double g = g_det[i];
    for (int r = cell.row0; r < cell.row0 + cell.height; ++r)
      for (int c = cell.col0; c < cell.col0 + cell.width; ++c)
        wb.zhat.at(r, c) = 2.0 * g * z.at(r, c);
  }

  for (int b = 0; b < T; ++b) {
    wb.u = wb.zhat;
    cache.prop.apply_adjoint(wb.u);  // through the final mask-free hop
    for (int l = B - 1; l >= 0; --l) {
      const ComplexField& y = wb.tape.branch[b][l];
      kernels::phase_grad_acc(y.data.data(), wb.u.data.data(),
                              acc.masks[model.branch_mask_index(b, l)].data(), y.size());
      modulate_adjoint_inplace(wb.u, cache.branch_phasors[b][l]);
      cache.prop.apply_adjoint(wb.u);
    }
    if (b == 0) {
      wb.xhat.rows = wb.u.rows;
      wb.xhat.cols = wb.u.cols;
      wb.xhat.data.resize(wb.u.size());
      kernels::scale(amps[b], wb.u.data.data(), wb.xhat.data.data(), wb.u.size());
    } else {
      kernels::axpy(amps[b], wb.u.data.data(), wb.xhat.data.data(), wb.u.size());
    }
  }

  std::swap(wb.u, wb.xhat);
  for (int s = S - 1; s >= 0; --s) {
    const ComplexField& x = wb.tape.trunk[s];
    kernels::phase_grad_acc(x.data.data(), wb.u.data.data(),
                            acc.masks[model.shared_mask_index(s)].data(), x.size());
    modulate_adjoint_inplace(wb.u, cache.shared_phasors[s]);
    if (s > 0 || !model.arch.input_plane_modulation) cache.prop.apply_adjoint(wb.u);
  }
}

std::vector<SampleRef> flatten(const std::vector<Batch>& task_batches,
                               const std::vector<double>& weights) {
  std::vector<SampleRef> refs;
  for (size_t t = 0; t < task_batches.size(); ++t) {
    if (task_batches[t].empty()) throw ValidationError("backward: empty batch for a task");
    const double w = weights[t] / static_cast<double>(task_batches[t].size());
    for (const Example& ex : task_batches[t]) refs.push_back({static_cast<int>(t), &ex, w});
  }
  return refs;
}

// Shared driver for total_loss / backward / backward_task. with_grad toggles
// the adjoint sweep; weights are the per-task loss weights.
double run_batches(const MultiTaskD2NN& model, const std::vector<Batch>& task_batches,
                   const std::vector<double>& weights, int threads, bool with_grad,
                   GradientSet* grads_out, std::vector<double>* mean_task_losses) {
  const int T = static_cast<int>(task_batches.size());
  ModelCache cache(model);
  const std::vector<Rect> cells = model.layout.cells();
  std::vector<LabelCodec> codecs;
  for (int t = 0; t < T; ++t) codecs.push_back(codec_for_task(t, model.arch.tasks));

  const std::vector<SampleRef> refs = flatten(task_batches, weights);
  const size_t n_chunks = (refs.size() + kChunkSamples - 1) / kChunkSamples;
  std::vector<GradientSet> chunk_grads(with_grad ? n_chunks : 0);
  std::vector<std::vector<double>> chunk_losses(n_chunks, std::vector<double>(T, 0.0));

  parallel_chunks(refs.size(), kChunkSamples, threads, [&](size_t k, size_t begin, size_t end) {
    WorkerBuffers wb;
    GradientSet* acc = nullptr;
    if (with_grad) {
      chunk_grads[k] = GradientSet::zeros_like(model);
      acc = &chunk_grads[k];
    }
    for (size_t i = begin; i < end; ++i) {
      const SampleRef& ref = refs[i];
      check_shape(ref.ex->input, cache.prop.spec(), "training sample");
      forward_pass(model, cache, ref.ex->input, &wb.tape);
      DetectorReading reading = read(wb.tape.intensity, model.layout);
      const std::vector<double> target = encode_target(codecs[ref.task], ref.ex->label);
      chunk_losses[k][ref.task] += task_loss(reading, target);
      if (with_grad) {
        std::vector<double> g_det = task_loss_grad(reading, target);
        for (double& g : g_det) g *= ref.weight;
        backprop_sample(model, cache, cells, g_det, wb, *acc);
      }
    }
  });

  std::vector<double> task_loss_sum(T, 0.0);
  for (size_t k = 0; k < n_chunks; ++k)
    for (int t = 0; t < T; ++t) task_loss_sum[t] += chunk_losses[k][t];

  double weighted = 0.0;
  for (int t = 0; t < T; ++t) {
    const double mean = task_loss_sum[t] / static_cast<double>(task_batches[t].size());
    if (mean_task_losses) (*mean_task_losses)[t] = mean;
    weighted += weights[t] * mean;
  }
  if (with_grad) {
    *grads_out = GradientSet::zeros_like(model);
    for (size_t k = 0; k < n_chunks; ++k) grads_out->accumulate(chunk_grads[k]);
  }
  return weighted;
}

std::vector<double> config_weights(const TrainConfig& cfg, int tasks) {
  std::vector<double> w(tasks, 1.0);
  if (tasks >= 1) w[0] = cfg.lambda1;
  if (tasks >= 2) w[1] = cfg.lambda2;
  return w;
}

// lambda_l2 * (lambda2/lambda1) * sum theta^2 over branch masks; gradient
// contribution 2 * coef * theta.
double apply_regularizer(const MultiTaskD2NN& model, const TrainConfig& cfg,
                         GradientSet* grads) {
  const double coef = cfg.lambda_l2 * cfg.lambda_ratio();
  double penalty = 0.0;
  for (size_t b = 0; b < model.branches.size(); ++b)
    for (size_t l = 0; l < model.branches[b].size(); ++l) {
      const PhaseMask& m = model.branches[b][l];
      const int idx = model.branch_mask_index(static_cast<int>(b), static_cast<int>(l));
      for (size_t j = 0; j < m.theta.size(); ++j) {
        penalty += m.theta[j] * m.theta[j];
        if (grads) grads->masks[idx][j] += 2.0 * coef * m.theta[j];
      }
    }
  return coef * penalty;
}

void check_task_batches(const MultiTaskD2NN& model, const std::vector<Batch>& task_batches) {
  if (static_cast<int>(task_batches.size()) != model.arch.tasks)
    throw ValidationError("expected one batch per task");
}

}  // namespace

GradientSet GradientSet::zeros_like(const MultiTaskD2NN& model) {
  GradientSet g;
  g.masks.resize(model.mask_count());
  for (int i = 0; i < model.mask_count(); ++i) g.masks[i].assign(model.mask(i).size(), 0.0);
  return g;
}

void GradientSet::accumulate(const GradientSet& other) {
  for (size_t i = 0; i < masks.size(); ++i)
    for (size_t j = 0; j < masks[i].size(); ++j) masks[i][j] += other.masks[i][j];
}

bool GradientSet::finite() const {
  for (const auto& m : masks)
    for (double v : m)
      if (!std::isfinite(v)) return false;
  return true;
}

double total_loss(const MultiTaskD2NN& model, const std::vector<Batch>& task_batches,
                  const TrainConfig& cfg, LossReport* report) {
  cfg.validate();
  check_task_batches(model, task_batches);
  std::vector<double> means(task_batches.size(), 0.0);
  const double weighted = run_batches(model, task_batches, config_weights(cfg, model.arch.tasks),
                                      cfg.threads, false, nullptr, &means);
  const double reg = apply_regularizer(model, cfg, nullptr);
  if (report) {
    report->task_losses = means;
    report->regularizer = reg;
    report->total = weighted + reg;
  }
  return weighted + reg;
}

GradientSet backward(const MultiTaskD2NN& model, const std::vector<Batch>& task_batches,
                     const TrainConfig& cfg, LossReport* report) {
  cfg.validate();
  check_task_batches(model, task_batches);
  GradientSet grads;
  std::vector<double> means(task_batches.size(), 0.0);
  const double weighted = run_batches(model, task_batches, config_weights(cfg, model.arch.tasks),
                                      cfg.threads, true, &grads, &means);
  const double reg = apply_regularizer(model, cfg, &grads);
  if (report) {
    report->task_losses = means;
    report->regularizer = reg;
    report->total = weighted + reg;
  }
  for (size_t i = 0; i < grads.masks.size(); ++i)
    for (double v : grads.masks[i])
      if (!std::isfinite(v))
        throw std::runtime_error("backward: non-finite gradient in mask " + std::to_string(i));
  return grads;
}

GradientSet backward_task(const MultiTaskD2NN& model, int task, const Batch& batch,
                          int threads) {
  if (task < 0 || task >= model.arch.tasks) throw ValidationError("backward_task: bad task id");
  ModelCache cache(model);
  const std::vector<Rect> cells = model.layout.cells();
  const LabelCodec codec = codec_for_task(task, model.arch.tasks);
  if (batch.empty()) throw ValidationError("backward_task: empty batch");

  const double w = 1.0 / static_cast<double>(batch.size());
  const size_t n_chunks = (batch.size() + kChunkSamples - 1) / kChunkSamples;
  std::vector<GradientSet> chunk_grads(n_chunks);
  parallel_chunks(batch.size(), kChunkSamples, threads, [&](size_t k, size_t begin, size_t end) {
    WorkerBuffers wb;
    chunk_grads[k] = GradientSet::zeros_like(model);
    for (size_t i = begin; i < end; ++i) {
      const Example& ex = batch[i];
      check_shape(ex.input, cache.prop.spec(), "training sample");
      forward_pass(model, cache, ex.input, &wb.tape);
      DetectorReading reading = read(wb.tape.intensity, model.layout);
      const std::vector<double> target = encode_target(codec, ex.label);
      std::vector<double> g_det = task_loss_grad(reading, target);
      for (double& g : g_det) g *= w;
      backprop_sample(model, cache, cells, g_det, wb, chunk_grads[k]);
    }
  });
  GradientSet grads = GradientSet::zeros_like(model);
  for (size_t k = 0; k < n_chunks; ++k) grads.accumulate(chunk_grads[k]);
  return grads;
}

}  // namespace d2nn
