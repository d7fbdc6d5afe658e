#include "d2nn/dataset.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>

#include "d2nn/kernels.hpp"

namespace d2nn {
namespace {

// gzread handles both gzip-wrapped and plain files.
std::vector<uint8_t> read_file(const std::string& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open " + path);
  std::vector<uint8_t> out;
  uint8_t buf[1 << 16];
  int n;
  while ((n = gzread(f, buf, sizeof(buf))) > 0) out.insert(out.end(), buf, buf + n);
  const bool ok = n == 0;
  gzclose(f);
  if (!ok) throw std::runtime_error("read error in " + path);
  return out;
}

uint32_t be32(const std::vector<uint8_t>& b, size_t off, const std::string& path) {
  if (off + 4 > b.size())
    throw std::runtime_error(path + ": truncated at offset " + std::to_string(off));
  return (uint32_t(b[off]) << 24) | (uint32_t(b[off + 1]) << 16) | (uint32_t(b[off + 2]) << 8) |
         uint32_t(b[off + 3]);
}

}  // namespace

Dataset load_idx(const std::string& image_path, const std::string& label_path) {
  const std::vector<uint8_t> ib = read_file(image_path);
  const std::vector<uint8_t> lb = read_file(label_path);

  const uint32_t image_magic = be32(ib, 0, image_path);
  if (image_magic != 0x00000803u)
    throw std::runtime_error(image_path + ": bad image magic 0x" + std::to_string(image_magic) +
                             " at offset 0 (expected 0x00000803)");
  const uint32_t label_magic = be32(lb, 0, label_path);
  if (label_magic != 0x00000801u)
    throw std::runtime_error(label_path + ": bad label magic at offset 0 (expected 0x00000801)");

  const uint32_t n_images = be32(ib, 4, image_path);
  const uint32_t rows = be32(ib, 8, image_path);
  const uint32_t cols = be32(ib, 12, image_path);
  const uint32_t n_labels = be32(lb, 4, label_path);

  if (n_images != n_labels)
    throw std::runtime_error("count mismatch: " + image_path + " has " + std::to_string(n_images) +
                             " images but " + label_path + " has " + std::to_string(n_labels) +
                             " labels");
  const size_t expected = 16 + static_cast<size_t>(n_images) * rows * cols;
  if (ib.size() < expected)
    throw std::runtime_error(image_path + ": truncated at offset " + std::to_string(ib.size()) +
                             " (expected " + std::to_string(expected) + " bytes)");
  if (lb.size() < 8 + n_labels)
    throw std::runtime_error(label_path + ": truncated at offset " + std::to_string(lb.size()));

  Dataset ds;
  ds.image_rows = static_cast<int>(rows);
  ds.image_cols = static_cast<int>(cols);
  ds.images.assign(ib.begin() + 16, ib.begin() + static_cast<long>(expected));
  ds.labels.assign(lb.begin() + 8, lb.begin() + 8 + n_labels);
  for (size_t i = 0; i < ds.labels.size(); ++i)
    if (ds.labels[i] > 9)
      throw std::runtime_error(label_path + ": label " + std::to_string(ds.labels[i]) +
                               " out of range at index " + std::to_string(i));
  return ds;
}

ComplexField encode_input(const uint8_t* image, int image_rows, int image_cols,
                          const PropagationSpec& spec, const EncodeOptions& opt) {
  spec.validate();
  if (opt.fill_fraction <= 0.0)
    throw ValidationError("encode_input: fill_fraction must be positive");
  const int target_h = std::max(1, static_cast<int>(std::lround(opt.fill_fraction * spec.grid_rows)));
  const int target_w = std::max(1, static_cast<int>(std::lround(opt.fill_fraction * spec.grid_cols)));
  if (target_h > spec.grid_rows || target_w > spec.grid_cols)
    throw ValidationError("encode_input: grid smaller than the scaled image");

  const int off_r = (spec.grid_rows - target_h) / 2;
  const int off_c = (spec.grid_cols - target_w) / 2;

  // Bilinear with half-pixel centers; the identity scale reproduces pixels
  // exactly.
  auto sample = [&](double rf, double cf) -> double {
    const int r0 = static_cast<int>(std::floor(rf));
    const int c0 = static_cast<int>(std::floor(cf));
    const double fr = rf - r0, fc = cf - c0;
    auto px = [&](int r, int c) -> double {
      r = std::min(std::max(r, 0), image_rows - 1);
      c = std::min(std::max(c, 0), image_cols - 1);
      return static_cast<double>(image[static_cast<size_t>(r) * image_cols + c]) / 255.0;
    };
    return (1 - fr) * ((1 - fc) * px(r0, c0) + fc * px(r0, c0 + 1)) +
           fr * ((1 - fc) * px(r0 + 1, c0) + fc * px(r0 + 1, c0 + 1));
  };

  ComplexField out(spec.grid_rows, spec.grid_cols);
  const double sr = static_cast<double>(image_rows) / target_h;
  const double sc = static_cast<double>(image_cols) / target_w;
  for (int r = 0; r < target_h; ++r) {
    const double rf = (r + 0.5) * sr - 0.5;
    for (int c = 0; c < target_w; ++c) {
      const double v = sample(rf, (c + 0.5) * sc - 0.5);
      cplx& dst = out.at(r + off_r, c + off_c);
      if (opt.encoding == InputEncoding::amplitude)
        dst = cplx(v, 0.0);
      else
        dst = cplx(std::cos(v * kPi), std::sin(v * kPi));
    }
  }
  if (opt.input_energy > 0.0 && opt.encoding == InputEncoding::amplitude) {
    const double e = out.energy();
    if (e > 0.0)
      kernels::scale(std::sqrt(opt.input_energy / e), out.data.data(), out.data.data(),
                     out.size());
  }
  return out;
}

}  // namespace d2nn
