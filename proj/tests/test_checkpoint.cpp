#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "d2nn/checkpoint.hpp"
#include "test_util.hpp"

using namespace d2nn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("d2nn_ckpt_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

ModelArch tiny_arch() {
  ModelArch a;
  a.grid_rows = a.grid_cols = 20;
  a.shared_layers = 2;
  a.branch_layers = 1;
  a.init_seed = 77;
  return a;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("scalar codecs are endian-fixed") {
  std::string buf;
  detail::put_u32_le(buf, 0x01020304u);
  CHECK(buf == std::string("\x04\x03\x02\x01", 4));
  buf.clear();
  detail::put_f64_le(buf, 1.0);  // IEEE-754: 0x3FF0000000000000
  CHECK(buf == std::string("\x00\x00\x00\x00\x00\x00\xF0\x3F", 8));

  for (double v : {0.0, -0.0, 1.5, -3.25e17, 2.2250738585072014e-308}) {
    std::string b;
    detail::put_f64_le(b, v);
    CHECK(detail::get_f64_le(reinterpret_cast<const uint8_t*>(b.data())) == v);
  }
  std::string b;
  detail::put_u64_le(b, 0x1122334455667788ULL);
  CHECK(detail::get_u64_le(reinterpret_cast<const uint8_t*>(b.data())) ==
        0x1122334455667788ULL);
}

TEST_CASE("checkpoint round trip is bit-exact, including optimizer state") {
  TempDir tmp;
  MultiTaskD2NN model = build_model(tiny_arch());
  AdamState state = AdamState::zeros_like(model);
  state.step = 17;
  Rng rng(5);
  for (auto& m : state.m)
    for (double& v : m) v = rng.uniform(-1, 1);
  for (auto& v2 : state.v)
    for (double& v : v2) v = rng.uniform(0, 1);

  CheckpointMeta meta{12, UpdateRule::paper_rule_sgd, 0xdeadbeefULL};
  const std::string path = tmp.file("model.d2nn");
  save_checkpoint(model, &state, meta, path);

  Checkpoint loaded = load_checkpoint(path);
  CHECK(loaded.version == 1);
  CHECK(loaded.meta.epochs_trained == 12);
  CHECK(loaded.meta.update_rule == UpdateRule::paper_rule_sgd);
  CHECK(loaded.meta.config_hash == 0xdeadbeefULL);
  for (int i = 0; i < model.mask_count(); ++i)
    CHECK(loaded.model.mask(i).theta == model.mask(i).theta);
  REQUIRE(loaded.optimizer.has_value());
  CHECK(loaded.optimizer->step == 17);
  CHECK(loaded.optimizer->m == state.m);
  CHECK(loaded.optimizer->v == state.v);

  // save -> load -> save: byte-identical files
  const std::string path2 = tmp.file("model2.d2nn");
  save_checkpoint(loaded.model, &*loaded.optimizer, loaded.meta, path2);
  CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("checkpoint without optimizer state") {
  TempDir tmp;
  MultiTaskD2NN model = build_model(tiny_arch());
  save_checkpoint(model, nullptr, {}, tmp.file("bare.d2nn"));
  Checkpoint loaded = load_checkpoint(tmp.file("bare.d2nn"));
  CHECK_FALSE(loaded.optimizer.has_value());
  CHECK(loaded.model.arch.grid_rows == 20);
}

TEST_CASE("corrupt checkpoints are rejected without partial models") {
  TempDir tmp;
  MultiTaskD2NN model = build_model(tiny_arch());
  const std::string path = tmp.file("model.d2nn");
  save_checkpoint(model, nullptr, {}, path);
  std::string bytes = slurp(path);

  // truncation
  std::ofstream(tmp.file("trunc.d2nn"), std::ios::binary)
      << bytes.substr(0, bytes.size() - 64);
  CHECK_THROWS_WITH_AS(load_checkpoint(tmp.file("trunc.d2nn")),
                       doctest::Contains("truncated"), std::runtime_error);

  // bad magic
  std::string bad = bytes;
  bad[0] = 'X';
  std::ofstream(tmp.file("magic.d2nn"), std::ios::binary) << bad;
  CHECK_THROWS_WITH_AS(load_checkpoint(tmp.file("magic.d2nn")),
                       doctest::Contains("magic"), std::runtime_error);

  // unsupported version
  std::string ver = bytes;
  ver[4] = 9;
  std::ofstream(tmp.file("ver.d2nn"), std::ios::binary) << ver;
  CHECK_THROWS_WITH_AS(load_checkpoint(tmp.file("ver.d2nn")),
                       doctest::Contains("version"), std::runtime_error);

  // trailing garbage
  std::ofstream(tmp.file("tail.d2nn"), std::ios::binary) << bytes + "zzz";
  CHECK_THROWS_WITH_AS(load_checkpoint(tmp.file("tail.d2nn")),
                       doctest::Contains("trailing"), std::runtime_error);

  // non-finite parameter
  MultiTaskD2NN nan_model = model;
  nan_model.shared[0].theta[5] = std::numeric_limits<double>::quiet_NaN();
  save_checkpoint(nan_model, nullptr, {}, tmp.file("nan.d2nn"));
  CHECK_THROWS_WITH_AS(load_checkpoint(tmp.file("nan.d2nn")),
                       doctest::Contains("non-finite"), std::runtime_error);
}
