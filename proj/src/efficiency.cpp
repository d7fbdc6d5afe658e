#include "d2nn/efficiency.hpp"

#include <json.hpp>

#include "d2nn/field.hpp"

namespace d2nn {

double acc_hw(double acc_multi, double acc_single, int det_multi, int det_single_total) {
  if (det_multi <= 0 || det_single_total <= 0)
    throw ValidationError("acc_hw: detector counts must be positive");
  if (acc_multi <= 0.0 || acc_multi > 1.0 || acc_single <= 0.0 || acc_single > 1.0)
    throw ValidationError("acc_hw: accuracies must lie in (0, 1]");
  return (acc_multi / acc_single) *
         (static_cast<double>(det_single_total) / static_cast<double>(det_multi));
}

EfficiencyReport make_efficiency_report(const std::vector<std::string>& task_names,
                                        const std::vector<double>& acc_single,
                                        const std::vector<double>& acc_multi,
                                        int det_multi, int det_single_total) {
  if (task_names.size() != acc_single.size() || task_names.size() != acc_multi.size())
    throw ValidationError("efficiency report: per-task vectors must have equal length");
  if (task_names.empty()) throw ValidationError("efficiency report: no tasks");
  EfficiencyReport report{task_names, acc_single, acc_multi, det_multi, det_single_total, {}};
  for (size_t t = 0; t < task_names.size(); ++t)
    report.acc_hw_values.push_back(
        acc_hw(acc_multi[t], acc_single[t], det_multi, det_single_total));
  return report;
}

std::string efficiency_report_json(const EfficiencyReport& report) {
  nlohmann::json j;
  j["det_multi"] = report.det_multi;
  j["det_single_total"] = report.det_single_total;
  nlohmann::json tasks = nlohmann::json::array();
  for (size_t t = 0; t < report.task_names.size(); ++t)
    tasks.push_back({{"task", report.task_names[t]},
                     {"acc_single", report.acc_single[t]},
                     {"acc_multi", report.acc_multi[t]},
                     {"acc_hw", report.acc_hw_values[t]}});
  j["tasks"] = tasks;
  return j.dump(2);
}

}  // namespace d2nn
