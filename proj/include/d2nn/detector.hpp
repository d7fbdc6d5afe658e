#pragma once

#include <vector>

#include "d2nn/field.hpp"

namespace d2nn {

struct Rect {
  int row0 = 0, col0 = 0, height = 0, width = 0;
  bool operator==(const Rect&) const = default;
};

/// Detector geometry: C disjoint rectangles on the output plane. With
/// sub_split = 2 every region is halved vertically into (left, right) readout
/// cells, doubling the number of logits without adding detectors.
struct DetectorLayout {
  std::vector<Rect> regions;
  int sub_split = 1;

  int region_count() const { return static_cast<int>(regions.size()); }
  int cell_count() const { return region_count() * sub_split; }

  /// Effective readout rectangles (regions, or their sub-cells), region-major.
  std::vector<Rect> cells() const;

  /// Disjointness, bounds, and sub-split feasibility checks.
  void validate(int grid_rows, int grid_cols) const;
};

/// Canonical layout: 10 square regions of side min(grid)/10, arranged
/// 2 rows x 5 columns, centered in uniform cells. Grid dims must be
/// multiples of 10.
DetectorLayout default_layout(int grid_rows, int grid_cols, int sub_split = 1);

/// Region-summed (or sub-cell-summed) intensities; the raw network output.
struct DetectorReading {
  std::vector<double> values;
};

DetectorReading read(const RealField& intensity, const DetectorLayout& layout);

enum class Polarity { argmin, argmax };

/// Per-task decision rule: which polarity the task's one-hot uses and, for
/// sub-split layouts, which sub-cell column belongs to the task.
struct LabelCodec {
  int task_id = 0;
  Polarity polarity = Polarity::argmax;
  int sub_cell = 0;
  int num_classes = 10;
  int sub_split = 1;
};

/// Canonical codec assignment for the 2-task and 4-task systems (task_id is
/// 0-based). Two tasks share 10 cells with opposite polarities; four tasks
/// share 20 sub-cells using (polarity, sub-cell) pairs.
LabelCodec codec_for_task(int task_id, int num_tasks);

/// argmin/argmax over the task's cells; ties break to the lowest class index.
int decide(const DetectorReading& reading, const LabelCodec& codec);

/// Target vector over all cells: argmax tasks use a standard one-hot (single 1
/// on a 0 background), argmin tasks the reversed one-hot (single 0 on a 1
/// background); cells of other sub-columns get the background value.
std::vector<double> encode_target(const LabelCodec& codec, int cls);

/// Heuristic task classifier for the 2-task system (experimental extension,
/// not part of the reference pipeline): compares how far the minimum and the
/// maximum stand out from the remaining cells and names the more salient
/// polarity's task.
int infer_task(const DetectorReading& reading);

}  // namespace d2nn
