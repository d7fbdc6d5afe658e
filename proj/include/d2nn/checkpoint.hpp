#pragma once

#include <optional>
#include <string>

#include "d2nn/model.hpp"
#include "d2nn/training.hpp"

namespace d2nn {

struct CheckpointMeta {
  int epochs_trained = 0;
  UpdateRule update_rule = UpdateRule::adam_autograd;
  uint64_t config_hash = 0;
};

struct Checkpoint {
  uint32_t version = 0;
  MultiTaskD2NN model;
  std::optional<AdamState> optimizer;
  CheckpointMeta meta;
};

/// Binary layout: magic "D2NN", u32 LE version, u64 LE header length, UTF-8
/// JSON header (architecture + metadata), then every mask row-major as f64 LE
/// in canonical order, then (optionally) the optimizer state. All multi-byte
/// values are encoded byte-by-byte, so files are identical across host
/// endianness.
void save_checkpoint(const MultiTaskD2NN& model, const AdamState* optimizer,
                     const CheckpointMeta& meta, const std::string& path);

/// Validates magic, version, shapes, and finiteness; throws on truncation or
/// mismatch without returning a partial model.
Checkpoint load_checkpoint(const std::string& path);

namespace detail {
// Endian-fixed scalar codecs (exposed for tests).
void put_u32_le(std::string& out, uint32_t v);
void put_u64_le(std::string& out, uint64_t v);
void put_f64_le(std::string& out, double v);
uint32_t get_u32_le(const uint8_t* p);
uint64_t get_u64_le(const uint8_t* p);
double get_f64_le(const uint8_t* p);
}  // namespace detail

}  // namespace d2nn
