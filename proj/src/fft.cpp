#include "d2nn/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "d2nn/kernels.hpp"

// FFTW backs the transforms. Plans are created once per (rows, cols, sign) with
// FFTW_ESTIMATE | FFTW_UNALIGNED (deterministic plan choice, no alignment
// constraint on execution buffers) and executed via the new-array interface,
// which is safe to call concurrently on distinct buffers.

namespace d2nn::fft {
namespace {

struct PlanKey {
  int rows, cols, sign;
  bool operator<(const PlanKey& o) const {
    if (rows != o.rows) return rows < o.rows;
    if (cols != o.cols) return cols < o.cols;
    return sign < o.sign;
  }
};

fftw_plan get_plan(int rows, int cols, int sign) {
  static std::map<PlanKey, fftw_plan> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({rows, cols, sign});
  if (it != cache.end()) return it->second;
  std::vector<cplx> scratch(static_cast<size_t>(rows) * cols);
  fftw_complex* p = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan =
      fftw_plan_dft_2d(rows, cols, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan) throw std::runtime_error("fftw_plan_dft_2d failed");
  cache[{rows, cols, sign}] = plan;
  return plan;
}

}  // namespace

void forward(cplx* data, int rows, int cols) {
  fftw_complex* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(get_plan(rows, cols, FFTW_FORWARD), p, p);
}

void inverse(cplx* data, int rows, int cols) {
  fftw_complex* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(get_plan(rows, cols, FFTW_BACKWARD), p, p);
  const size_t n = static_cast<size_t>(rows) * cols;
  kernels::scale(1.0 / static_cast<double>(n), data, data, n);
}

}  // namespace d2nn::fft
