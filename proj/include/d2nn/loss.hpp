#pragma once

#include <vector>

#include "d2nn/detector.hpp"

namespace d2nn {

std::vector<double> log_softmax(const std::vector<double>& v);

/// Mean squared error between log_softmax(reading) and the target vector.
/// Adding a constant to every reading entry leaves the value unchanged
/// (softmax shift invariance).
double task_loss(const DetectorReading& reading, const std::vector<double>& target);

/// d(task_loss)/d(reading).
std::vector<double> task_loss_grad(const DetectorReading& reading,
                                   const std::vector<double>& target);

}  // namespace d2nn
