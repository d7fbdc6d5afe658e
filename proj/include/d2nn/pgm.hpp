#pragma once

#include <string>
#include <vector>

#include "d2nn/field.hpp"
#include "d2nn/model.hpp"

namespace d2nn {

/// 8-bit binary PGM (P5), min-max normalized per image; a constant image maps
/// to all zeros.
void write_pgm(const std::string& path, const RealField& image);

enum class FieldExport { magnitude, phase };

/// Complex fields export |z| by default, arg(z) with FieldExport::phase.
void export_heatmap(const ComplexField& field, const std::string& path,
                    FieldExport mode = FieldExport::magnitude);
void export_heatmap(const RealField& image, const std::string& path);

/// One PGM per stage, ordered input -> trunk -> branches -> combined ->
/// intensity; returns the written paths.
std::vector<std::string> export_trace(const ForwardTrace& trace, const std::string& dir,
                                      const std::string& prefix);

}  // namespace d2nn
