#include "d2nn/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "d2nn/field.hpp"

namespace d2nn::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect_default() {
  if (const char* env = std::getenv("D2NN_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0) {
      if (!cpu_has_avx2()) throw ValidationError("D2NN_KERNELS=avx2 but CPU lacks AVX2+FMA");
      return Backend::avx2;
    }
    // anything else (including "auto") falls through to detection
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

Backend& backend_slot() {
  static Backend b = detect_default();
  return b;
}

}  // namespace

bool avx2_supported() { return cpu_has_avx2(); }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !cpu_has_avx2())
    throw ValidationError("AVX2 kernel backend requested but CPU lacks AVX2+FMA");
  backend_slot() = b;
}

Backend active_backend() { return backend_slot(); }

const char* backend_name() {
  return backend_slot() == Backend::avx2 ? "avx2" : "scalar";
}

const Ops& ops() {
#if defined(__x86_64__) || defined(_M_X64)
  return backend_slot() == Backend::avx2 ? avx2_ops : scalar_ops;
#else
  return scalar_ops;
#endif
}

}  // namespace d2nn::kernels
