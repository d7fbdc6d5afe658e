#include "d2nn/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace d2nn {
namespace detail {

void put_u32_le(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64_le(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64_le(std::string& out, double v) { put_u64_le(out, std::bit_cast<uint64_t>(v)); }

uint32_t get_u32_le(const uint8_t* p) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[i]) << (8 * i);
  return v;
}

uint64_t get_u64_le(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
  return v;
}

double get_f64_le(const uint8_t* p) { return std::bit_cast<double>(get_u64_le(p)); }

}  // namespace detail

namespace {

using nlohmann::json;
constexpr uint32_t kVersion = 1;
constexpr char kMagic[4] = {'D', '2', 'N', 'N'};

json arch_to_json(const ModelArch& a) {
  json j;
  j["shared_layers"] = a.shared_layers;
  j["branch_layers"] = a.branch_layers;
  j["tasks"] = a.tasks;
  j["grid_rows"] = a.grid_rows;
  j["grid_cols"] = a.grid_cols;
  j["wavelength_m"] = a.wavelength;
  j["pixel_pitch_m"] = a.pixel_pitch;
  j["layer_distance_m"] = a.layer_distance;
  j["zero_pad"] = a.zero_pad;
  j["input_plane_modulation"] = a.input_plane_modulation;
  j["splitter_transmitted"] = a.splitter_transmitted;
  j["splitter_reflected"] = a.splitter_reflected;
  j["detector_sub_split"] = a.detector_sub_split;
  j["init_seed"] = a.init_seed;
  if (!a.custom_regions.empty()) {
    json regions = json::array();
    for (const Rect& r : a.custom_regions)
      regions.push_back({r.row0, r.col0, r.height, r.width});
    j["regions"] = regions;
  }
  return j;
}

ModelArch arch_from_json(const json& j) {
  ModelArch a;
  a.shared_layers = j.at("shared_layers").get<int>();
  a.branch_layers = j.at("branch_layers").get<int>();
  a.tasks = j.at("tasks").get<int>();
  a.grid_rows = j.at("grid_rows").get<int>();
  a.grid_cols = j.at("grid_cols").get<int>();
  a.wavelength = j.at("wavelength_m").get<double>();
  a.pixel_pitch = j.at("pixel_pitch_m").get<double>();
  a.layer_distance = j.at("layer_distance_m").get<double>();
  a.zero_pad = j.at("zero_pad").get<bool>();
  a.input_plane_modulation = j.at("input_plane_modulation").get<bool>();
  a.splitter_transmitted = j.at("splitter_transmitted").get<double>();
  a.splitter_reflected = j.at("splitter_reflected").get<double>();
  a.detector_sub_split = j.at("detector_sub_split").get<int>();
  a.init_seed = j.at("init_seed").get<uint64_t>();
  if (j.contains("regions"))
    for (const auto& r : j.at("regions"))
      a.custom_regions.push_back({r.at(0).get<int>(), r.at(1).get<int>(), r.at(2).get<int>(),
                                  r.at(3).get<int>()});
  return a;
}

void append_mask_block(std::string& out, const std::vector<double>& values) {
  for (double v : values) detail::put_f64_le(out, v);
}

}  // namespace

void save_checkpoint(const MultiTaskD2NN& model, const AdamState* optimizer,
                     const CheckpointMeta& meta, const std::string& path) {
  json header;
  header["architecture"] = arch_to_json(model.arch);
  header["meta"] = {{"epochs_trained", meta.epochs_trained},
                    {"update_rule", update_rule_name(meta.update_rule)},
                    {"config_hash", meta.config_hash}};
  header["has_optimizer"] = optimizer != nullptr;
  const std::string header_str = header.dump();

  std::string out;
  out.append(kMagic, 4);
  detail::put_u32_le(out, kVersion);
  detail::put_u64_le(out, header_str.size());
  out += header_str;
  for (int i = 0; i < model.mask_count(); ++i) append_mask_block(out, model.mask(i).theta);
  if (optimizer) {
    detail::put_u64_le(out, static_cast<uint64_t>(optimizer->step));
    for (const auto& m : optimizer->m) append_mask_block(out, m);
    for (const auto& v : optimizer->v) append_mask_block(out, v);
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const uint8_t* p = reinterpret_cast<const uint8_t*>(bytes.data());
  const size_t n = bytes.size();

  auto need = [&](size_t off, size_t count, const char* what) {
    if (off + count > n)
      throw std::runtime_error(path + ": truncated checkpoint (" + what + " at offset " +
                               std::to_string(off) + ")");
  };

  need(0, 16, "header");
  if (std::memcmp(p, kMagic, 4) != 0) throw std::runtime_error(path + ": bad checkpoint magic");
  const uint32_t version = detail::get_u32_le(p + 4);
  if (version != kVersion)
    throw std::runtime_error(path + ": unsupported checkpoint version " + std::to_string(version));
  const uint64_t header_len = detail::get_u64_le(p + 8);
  need(16, header_len, "JSON header");

  json header;
  try {
    header = json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<long>(header_len));
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": corrupt checkpoint header: " + e.what());
  }

  Checkpoint ckpt;
  ckpt.version = version;
  ModelArch arch;
  try {
    arch = arch_from_json(header.at("architecture"));
    ckpt.meta.epochs_trained = header.at("meta").at("epochs_trained").get<int>();
    ckpt.meta.update_rule =
        update_rule_from_name(header.at("meta").at("update_rule").get<std::string>());
    ckpt.meta.config_hash = header.at("meta").at("config_hash").get<uint64_t>();
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": incomplete checkpoint header: " + e.what());
  }
  arch.validate();

  MultiTaskD2NN model;
  model.arch = arch;
  model.splitter = {arch.splitter_transmitted, arch.splitter_reflected};
  model.layout = arch.make_layout();
  model.shared.assign(arch.shared_layers, PhaseMask(arch.grid_rows, arch.grid_cols));
  model.branches.assign(arch.tasks,
                        std::vector<PhaseMask>(arch.branch_layers,
                                               PhaseMask(arch.grid_rows, arch.grid_cols)));

  size_t off = 16 + header_len;
  auto read_block = [&](std::vector<double>& dst, const char* what) {
    need(off, dst.size() * 8, what);
    for (size_t j = 0; j < dst.size(); ++j) {
      dst[j] = detail::get_f64_le(p + off);
      off += 8;
    }
  };
  for (int i = 0; i < model.mask_count(); ++i) {
    read_block(model.mask(i).theta, "mask data");
    for (double v : model.mask(i).theta)
      if (!std::isfinite(v))
        throw std::runtime_error(path + ": non-finite parameter in mask " + std::to_string(i));
  }

  if (header.at("has_optimizer").get<bool>()) {
    AdamState state = AdamState::zeros_like(model);
    need(off, 8, "optimizer step");
    state.step = static_cast<int64_t>(detail::get_u64_le(p + off));
    off += 8;
    for (auto& m : state.m) read_block(m, "optimizer m");
    for (auto& v : state.v) read_block(v, "optimizer v");
    ckpt.optimizer = std::move(state);
  }
  if (off != n)
    throw std::runtime_error(path + ": trailing bytes after checkpoint payload");
  ckpt.model = std::move(model);
  return ckpt;
}

}  // namespace d2nn
