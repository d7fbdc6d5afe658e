#include "d2nn/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace d2nn {
namespace {

RealField magnitude_of(const ComplexField& f, FieldExport mode) {
  RealField out(f.rows, f.cols);
  for (size_t i = 0; i < f.size(); ++i)
    out.data[i] = mode == FieldExport::magnitude ? std::abs(f.data[i]) : std::arg(f.data[i]);
  return out;
}

std::string stage_path(const std::string& dir, const std::string& prefix, int index,
                       const std::string& name) {
  char idx[8];
  std::snprintf(idx, sizeof(idx), "%02d", index);
  return (std::filesystem::path(dir) / (prefix + "_stage" + idx + "_" + name + ".pgm")).string();
}

}  // namespace

void write_pgm(const std::string& path, const RealField& image) {
  if (!image.finite()) throw ValidationError("write_pgm: non-finite data");
  const auto [mn_it, mx_it] = std::minmax_element(image.data.begin(), image.data.end());
  const double mn = *mn_it, mx = *mx_it;
  const double scale = mx > mn ? 255.0 / (mx - mn) : 0.0;

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "P5\n" << image.cols << " " << image.rows << "\n255\n";
  std::vector<uint8_t> row(static_cast<size_t>(image.cols));
  for (int r = 0; r < image.rows; ++r) {
    for (int c = 0; c < image.cols; ++c)
      row[c] = static_cast<uint8_t>(std::lround((image.at(r, c) - mn) * scale));
    f.write(reinterpret_cast<const char*>(row.data()), image.cols);
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

void export_heatmap(const ComplexField& field, const std::string& path, FieldExport mode) {
  write_pgm(path, magnitude_of(field, mode));
}

void export_heatmap(const RealField& image, const std::string& path) { write_pgm(path, image); }

std::vector<std::string> export_trace(const ForwardTrace& trace, const std::string& dir,
                                      const std::string& prefix) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> paths;
  int stage = 0;
  auto emit = [&](const ComplexField& f, const std::string& name) {
    paths.push_back(stage_path(dir, prefix, stage++, name));
    export_heatmap(f, paths.back());
  };
  emit(trace.input, "input");
  for (size_t s = 0; s < trace.trunk.size(); ++s)
    emit(trace.trunk[s], "shared" + std::to_string(s));
  for (size_t b = 0; b < trace.branch.size(); ++b)
    for (size_t l = 0; l < trace.branch[b].size(); ++l)
      emit(trace.branch[b][l], "branch" + std::to_string(b) + "_layer" + std::to_string(l));
  for (size_t b = 0; b < trace.branch_detector.size(); ++b)
    emit(trace.branch_detector[b], "branch" + std::to_string(b) + "_detector");
  emit(trace.combined, "combined");
  paths.push_back(stage_path(dir, prefix, stage++, "intensity"));
  write_pgm(paths.back(), trace.intensity);
  return paths;
}

}  // namespace d2nn
