#pragma once

#include <string>
#include <vector>

namespace d2nn {

/// Accuracy-per-hardware-cost figure of merit, cost counted in detectors and
/// oriented so a cheaper system at equal accuracy scores proportionally
/// higher:
///   acc_hw = (acc_multi / acc_single) * (det_single_total / det_multi)
double acc_hw(double acc_multi, double acc_single, int det_multi, int det_single_total);

struct EfficiencyReport {
  std::vector<std::string> task_names;
  std::vector<double> acc_single;   // per-task single-task baseline accuracy
  std::vector<double> acc_multi;    // per-task multi-task accuracy
  int det_multi = 0;                // detectors in the shared system
  int det_single_total = 0;         // detectors summed over the single-task systems
  std::vector<double> acc_hw_values;
};

EfficiencyReport make_efficiency_report(const std::vector<std::string>& task_names,
                                        const std::vector<double>& acc_single,
                                        const std::vector<double>& acc_multi,
                                        int det_multi, int det_single_total);

std::string efficiency_report_json(const EfficiencyReport& report);

}  // namespace d2nn
