#include "d2nn/detector.hpp"

#include <algorithm>
#include <limits>

namespace d2nn {

std::vector<Rect> DetectorLayout::cells() const {
  if (sub_split == 1) return regions;
  std::vector<Rect> out;
  out.reserve(regions.size() * sub_split);
  for (const Rect& r : regions) {
    const int w = r.width / sub_split;
    for (int s = 0; s < sub_split; ++s)
      out.push_back({r.row0, r.col0 + s * w, r.height, w});
  }
  return out;
}

void DetectorLayout::validate(int grid_rows, int grid_cols) const {
  if (regions.empty()) throw ValidationError("DetectorLayout: no regions");
  if (sub_split < 1) throw ValidationError("DetectorLayout: sub_split must be >= 1");
  for (const Rect& r : regions) {
    if (r.height <= 0 || r.width <= 0) throw ValidationError("DetectorLayout: empty region");
    if (r.row0 < 0 || r.col0 < 0 || r.row0 + r.height > grid_rows || r.col0 + r.width > grid_cols)
      throw ValidationError("DetectorLayout: region out of grid bounds");
    if (r.width % sub_split != 0)
      throw ValidationError("DetectorLayout: region width not divisible by sub_split");
  }
  for (size_t i = 0; i < regions.size(); ++i)
    for (size_t j = i + 1; j < regions.size(); ++j) {
      const Rect &a = regions[i], &b = regions[j];
      const bool overlap = a.row0 < b.row0 + b.height && b.row0 < a.row0 + a.height &&
                           a.col0 < b.col0 + b.width && b.col0 < a.col0 + a.width;
      if (overlap) throw ValidationError("DetectorLayout: regions overlap");
    }
}

DetectorLayout default_layout(int grid_rows, int grid_cols, int sub_split) {
  if (grid_rows % 10 != 0 || grid_cols % 10 != 0)
    throw ValidationError("default_layout: grid dims must be multiples of 10");
  const int side = std::min(grid_rows, grid_cols) / 10;
  const int cell_h = grid_rows / 2, cell_w = grid_cols / 5;
  const int off_r = (cell_h - side) / 2, off_c = (cell_w - side) / 2;
  DetectorLayout layout;
  layout.sub_split = sub_split;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 5; ++c)
      layout.regions.push_back({r * cell_h + off_r, c * cell_w + off_c, side, side});
  layout.validate(grid_rows, grid_cols);
  return layout;
}

namespace {

double rect_sum(const RealField& img, const Rect& rect) {
  double sum = 0.0;
  for (int r = rect.row0; r < rect.row0 + rect.height; ++r)
    for (int c = rect.col0; c < rect.col0 + rect.width; ++c) sum += img.at(r, c);
  return sum;
}

}  // namespace

DetectorReading read(const RealField& intensity, const DetectorLayout& layout) {
  layout.validate(intensity.rows, intensity.cols);
  DetectorReading out;
  out.values.reserve(layout.cell_count());
  for (const Rect& region : layout.regions) {
    if (layout.sub_split > 1) {
      const int w = region.width / layout.sub_split;
      for (int s = 0; s < layout.sub_split; ++s)
        out.values.push_back(rect_sum(intensity, {region.row0, region.col0 + s * w,
                                                  region.height, w}));
    } else if (region.width % 2 == 0) {
      // accumulate per half so a sub-split reading partitions the region sum
      // bit-exactly
      const int w = region.width / 2;
      out.values.push_back(
          rect_sum(intensity, {region.row0, region.col0, region.height, w}) +
          rect_sum(intensity, {region.row0, region.col0 + w, region.height, w}));
    } else {
      out.values.push_back(rect_sum(intensity, region));
    }
  }
  return out;
}

LabelCodec codec_for_task(int task_id, int num_tasks) {
  if (num_tasks == 1) return {0, Polarity::argmax, 0, 10, 1};
  if (num_tasks == 2) {
    if (task_id == 0) return {0, Polarity::argmin, 0, 10, 1};
    if (task_id == 1) return {1, Polarity::argmax, 0, 10, 1};
  }
  if (num_tasks == 4) {
    switch (task_id) {
      case 0: return {0, Polarity::argmax, 0, 10, 2};
      case 1: return {1, Polarity::argmax, 1, 10, 2};
      case 2: return {2, Polarity::argmin, 1, 10, 2};
      case 3: return {3, Polarity::argmin, 0, 10, 2};
    }
  }
  throw ValidationError("codec_for_task: no codec for task " + std::to_string(task_id) +
                        " of " + std::to_string(num_tasks));
}

int decide(const DetectorReading& reading, const LabelCodec& codec) {
  const int expected = codec.num_classes * codec.sub_split;
  if (static_cast<int>(reading.values.size()) != expected)
    throw ValidationError("decide: reading length " + std::to_string(reading.values.size()) +
                          " does not match codec arity " + std::to_string(expected));
  int best = 0;
  double best_v = reading.values[codec.sub_cell];
  for (int c = 1; c < codec.num_classes; ++c) {
    const double v = reading.values[c * codec.sub_split + codec.sub_cell];
    const bool better = codec.polarity == Polarity::argmin ? v < best_v : v > best_v;
    if (better) {
      best = c;
      best_v = v;
    }
  }
  return best;
}

std::vector<double> encode_target(const LabelCodec& codec, int cls) {
  if (cls < 0 || cls >= codec.num_classes)
    throw ValidationError("encode_target: class out of range");
  const double background = codec.polarity == Polarity::argmin ? 1.0 : 0.0;
  std::vector<double> target(static_cast<size_t>(codec.num_classes) * codec.sub_split, background);
  target[static_cast<size_t>(cls) * codec.sub_split + codec.sub_cell] = 1.0 - background;
  return target;
}

int infer_task(const DetectorReading& reading) {
  const auto& v = reading.values;
  if (v.size() < 3) throw ValidationError("infer_task: too few cells");
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  const size_t n = sorted.size();
  double median = sorted[n / 2];
  double min_margin = median - sorted[0];
  double max_margin = sorted[n - 1] - median;
  return min_margin >= max_margin ? 0 : 1;
}

}  // namespace d2nn
