#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "d2nn/field.hpp"

namespace d2nn {

/// Labeled image collection in memory (IDX source). Images are 28x28 bytes.
struct Dataset {
  int task_id = 0;
  int image_rows = 28;
  int image_cols = 28;
  std::vector<uint8_t> images;  // size() * rows * cols
  std::vector<uint8_t> labels;
  std::string split;  // "train" | "test"

  size_t size() const { return labels.size(); }
  const uint8_t* image(size_t i) const {
    return images.data() + i * static_cast<size_t>(image_rows) * image_cols;
  }
};

/// Parses big-endian IDX files (images magic 0x00000803, labels 0x00000801).
/// Gzip-compressed files are accepted transparently. Errors name the offending
/// byte offset.
Dataset load_idx(const std::string& image_path, const std::string& label_path);

enum class InputEncoding { amplitude, phase };

struct EncodeOptions {
  /// Fraction of the grid the (square, centered) image occupies.
  double fill_fraction = 1.0;
  /// amplitude: pixel -> [0,1] amplitude, zero phase.
  /// phase: pixel -> phase in [0, pi], unit amplitude inside the image square.
  InputEncoding encoding = InputEncoding::amplitude;
  /// When > 0, rescale the encoded field so its total energy equals this value
  /// (amplitude mode only). Sets the operating scale of the detector sums.
  double input_energy = 0.0;
};

/// Bilinearly resamples the byte image into a centered square of the grid;
/// pixels outside the square are zero.
ComplexField encode_input(const uint8_t* image, int image_rows, int image_cols,
                          const PropagationSpec& spec, const EncodeOptions& opt = {});

}  // namespace d2nn
