#include "d2nn/loss.hpp"

#include <algorithm>
#include <cmath>

namespace d2nn {
namespace {

void check_lengths(size_t a, size_t b) {
  if (a == 0) throw ValidationError("task_loss: empty reading");
  if (a != b) throw ValidationError("task_loss: reading and target lengths differ");
}

}  // namespace

std::vector<double> log_softmax(const std::vector<double>& v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - mx);
  const double lse = mx + std::log(sum);
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] - lse;
  return out;
}

double task_loss(const DetectorReading& reading, const std::vector<double>& target) {
  check_lengths(reading.values.size(), target.size());
  const std::vector<double> l = log_softmax(reading.values);
  double acc = 0.0;
  for (size_t i = 0; i < l.size(); ++i) {
    const double r = l[i] - target[i];
    acc += r * r;
  }
  return acc / static_cast<double>(l.size());
}

std::vector<double> task_loss_grad(const DetectorReading& reading,
                                   const std::vector<double>& target) {
  check_lengths(reading.values.size(), target.size());
  const size_t n = reading.values.size();
  const std::vector<double> l = log_softmax(reading.values);
  // softmax probabilities from the log values
  std::vector<double> p(n);
  for (size_t i = 0; i < n; ++i) p[i] = std::exp(l[i]);

  // dL/dl_i = (2/n)(l_i - t_i); dl_i/dv_k = delta_ik - p_k
  double g_sum = 0.0;
  std::vector<double> g(n);
  for (size_t i = 0; i < n; ++i) {
    g[i] = 2.0 / static_cast<double>(n) * (l[i] - target[i]);
    g_sum += g[i];
  }
  std::vector<double> out(n);
  for (size_t k = 0; k < n; ++k) out[k] = g[k] - p[k] * g_sum;
  return out;
}

}  // namespace d2nn
