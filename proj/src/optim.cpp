#include <cmath>

#include "d2nn/training.hpp"

namespace d2nn {

const char* update_rule_name(UpdateRule r) {
  return r == UpdateRule::adam_autograd ? "adam-autograd" : "paper-rule-sgd";
}

UpdateRule update_rule_from_name(const std::string& name) {
  if (name == "adam-autograd") return UpdateRule::adam_autograd;
  if (name == "paper-rule-sgd") return UpdateRule::paper_rule_sgd;
  throw ValidationError("unknown update rule: " + name);
}

void TrainConfig::validate() const {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0))
    throw ValidationError("TrainConfig: lambda1 and lambda2 must be > 0");
  if (lambda_l2 < 0.0) throw ValidationError("TrainConfig: lambda_l2 must be >= 0");
  if (!(eta > 0.0)) throw ValidationError("TrainConfig: eta must be > 0");
  if (adam_beta1 < 0.0 || adam_beta1 >= 1.0 || adam_beta2 < 0.0 || adam_beta2 >= 1.0)
    throw ValidationError("TrainConfig: betas must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw ValidationError("TrainConfig: adam_eps must be > 0");
  if (batch_size < 1) throw ValidationError("TrainConfig: batch_size must be >= 1");
  if (epochs < 0) throw ValidationError("TrainConfig: epochs must be >= 0");
}

AdamState AdamState::zeros_like(const MultiTaskD2NN& model) {
  AdamState s;
  s.m.resize(model.mask_count());
  s.v.resize(model.mask_count());
  for (int i = 0; i < model.mask_count(); ++i) {
    s.m[i].assign(model.mask(i).size(), 0.0);
    s.v[i].assign(model.mask(i).size(), 0.0);
  }
  return s;
}

void adam_step(MultiTaskD2NN& model, const GradientSet& grads, const TrainConfig& cfg,
               AdamState& state) {
  if (static_cast<int>(grads.masks.size()) != model.mask_count() ||
      static_cast<int>(state.m.size()) != model.mask_count())
    throw ValidationError("adam_step: gradient/state shape mismatch");
  state.step += 1;
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (int i = 0; i < model.mask_count(); ++i) {
    PhaseMask& mask = model.mask(i);
    const std::vector<double>& g = grads.masks[i];
    if (g.size() != mask.size()) throw ValidationError("adam_step: mask shape mismatch");
    std::vector<double>& m = state.m[i];
    std::vector<double>& v = state.v[i];
    for (size_t j = 0; j < g.size(); ++j) {
      m[j] = b1 * m[j] + (1.0 - b1) * g[j];
      v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
      const double mhat = m[j] / c1;
      const double vhat = v[j] / c2;
      mask.theta[j] -= cfg.eta * mhat / (std::sqrt(vhat) + cfg.adam_eps);
    }
  }
}

void paper_rule_step(MultiTaskD2NN& model, const GradientSet& g_task1,
                     const GradientSet& g_task2, const TrainConfig& cfg) {
  if (model.arch.tasks != 2)
    throw ValidationError("paper_rule_step: defined for the two-task system only");
  if (static_cast<int>(g_task1.masks.size()) != model.mask_count() ||
      static_cast<int>(g_task2.masks.size()) != model.mask_count())
    throw ValidationError("paper_rule_step: gradient shape mismatch");

  const double ratio = cfg.lambda_ratio();
  const int S = static_cast<int>(model.shared.size());
  const int B = model.arch.branch_layers;

  for (int s = 0; s < S; ++s) {
    PhaseMask& mask = model.shared[s];
    const auto& g1 = g_task1.masks[model.shared_mask_index(s)];
    const auto& g2 = g_task2.masks[model.shared_mask_index(s)];
    for (size_t j = 0; j < mask.size(); ++j)
      mask.theta[j] -= 0.5 * cfg.eta * ratio * (g1[j] + g2[j]);
  }
  // The printed regularizer term is applied elementwise on (theta1 + theta2),
  // layer by layer; note this is the rule as published, not the gradient of
  // the quadratic penalty.
  for (int l = 0; l < B; ++l) {
    PhaseMask& t1 = model.branches[0][l];
    PhaseMask& t2 = model.branches[1][l];
    const auto& g1 = g_task1.masks[model.branch_mask_index(0, l)];
    const auto& g2 = g_task2.masks[model.branch_mask_index(1, l)];
    for (size_t j = 0; j < t1.size(); ++j) {
      const double pair_sum = t1.theta[j] + t2.theta[j];
      t1.theta[j] -= cfg.eta * g1[j] + 2.0 * cfg.eta * cfg.lambda_l2 * pair_sum;
      t2.theta[j] -= cfg.eta * g2[j] + 2.0 * cfg.eta * cfg.lambda_l2 * pair_sum;
    }
  }
}

}  // namespace d2nn
