#include "d2nn/propagation.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "d2nn/fft.hpp"
#include "d2nn/kernels.hpp"

namespace d2nn {
namespace {

constexpr int kOracleCap = 64;

// FFT-ordered frequency for index m of an even-length axis.
inline double fft_freq(int m, int n, double pitch) {
  int k = (m < n / 2) ? m : m - n;
  return static_cast<double>(k) / (static_cast<double>(n) * pitch);
}

PropagationSpec padded_spec(const PropagationSpec& spec) {
  PropagationSpec p = spec;
  p.grid_rows *= 2;
  p.grid_cols *= 2;
  p.zero_pad = false;
  return p;
}

ComplexField embed_center(const ComplexField& f) {
  ComplexField out(f.rows * 2, f.cols * 2);
  for (int r = 0; r < f.rows; ++r)
    for (int c = 0; c < f.cols; ++c) out.at(r + f.rows / 2, c + f.cols / 2) = f.at(r, c);
  return out;
}

ComplexField crop_center(const ComplexField& f) {
  ComplexField out(f.rows / 2, f.cols / 2);
  for (int r = 0; r < out.rows; ++r)
    for (int c = 0; c < out.cols; ++c) out.at(r, c) = f.at(r + out.rows / 2, c + out.cols / 2);
  return out;
}

ComplexField transfer_unpadded(const PropagationSpec& spec) {
  const int rows = spec.grid_rows, cols = spec.grid_cols;
  const double k = spec.wavenumber();
  const double d = spec.layer_distance;
  const double quad = kPi * spec.wavelength * d;
  ComplexField H(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const double fy = fft_freq(r, rows, spec.pixel_pitch);
    for (int c = 0; c < cols; ++c) {
      const double fx = fft_freq(c, cols, spec.pixel_pitch);
      const double phase = k * d - quad * (fx * fx + fy * fy);
      H.at(r, c) = cplx(std::cos(phase), std::sin(phase));
    }
  }
  return H;
}

void check_oracle_cap(const PropagationSpec& spec) {
  if (spec.grid_rows > kOracleCap || spec.grid_cols > kOracleCap)
    throw ValidationError("propagate_direct: grid exceeds the " + std::to_string(kOracleCap) +
                          "x" + std::to_string(kOracleCap) + " oracle cap");
}

// h is memoized per spec; recomputing the direct-summation IDFT for every
// oracle trial would dominate the acceptance-suite budget.
ComplexField impulse_response_cached(const PropagationSpec& spec) {
  using Key = std::tuple<double, double, double, int, int>;
  static std::map<Key, ComplexField> cache;
  static std::mutex mu;
  Key key{spec.wavelength, spec.layer_distance, spec.pixel_pitch, spec.grid_rows, spec.grid_cols};
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const int rows = spec.grid_rows, cols = spec.grid_cols;
  ComplexField H = transfer_unpadded(spec);
  ComplexField h(rows, cols);
  const double inv = 1.0 / (static_cast<double>(rows) * cols);
  for (int x = 0; x < rows; ++x) {
    for (int y = 0; y < cols; ++y) {
      cplx acc(0.0, 0.0);
      for (int m = 0; m < rows; ++m) {
        const double pr = 2.0 * kPi * m * x / rows;
        for (int n = 0; n < cols; ++n) {
          const double phase = pr + 2.0 * kPi * n * y / cols;
          acc += H.at(m, n) * cplx(std::cos(phase), std::sin(phase));
        }
      }
      h.at(x, y) = acc * inv;
    }
  }
  cache[key] = h;
  return h;
}

ComplexField convolve_circular(const ComplexField& f, const ComplexField& h) {
  const int rows = f.rows, cols = f.cols;
  ComplexField out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      cplx acc(0.0, 0.0);
      for (int rp = 0; rp < rows; ++rp) {
        const int dr = (r - rp + rows) % rows;
        for (int cp = 0; cp < cols; ++cp) {
          const int dc = (c - cp + cols) % cols;
          acc += f.at(rp, cp) * h.at(dr, dc);
        }
      }
      out.at(r, c) = acc;
    }
  }
  return out;
}

}  // namespace

ComplexField transfer_function(const PropagationSpec& spec) {
  spec.validate();
  return transfer_unpadded(spec.zero_pad ? padded_spec(spec) : spec);
}

ComplexField sampled_impulse_response(const PropagationSpec& spec) {
  spec.validate();
  PropagationSpec eff = spec.zero_pad ? padded_spec(spec) : spec;
  check_oracle_cap(eff);
  return impulse_response_cached(eff);
}

Propagator::Propagator(const PropagationSpec& spec) : spec_(spec) {
  spec_.validate();
  transfer_ = transfer_unpadded(spec_.zero_pad ? padded_spec(spec_) : spec_);
}

void Propagator::filtered(ComplexField& f, bool conjugate) const {
  check_shape(f, spec_, "propagate");
  if (spec_.zero_pad) {
    ComplexField padded = embed_center(f);
    fft::forward(padded);
    if (conjugate)
      kernels::cmul_conj(transfer_.data.data(), padded.data.data(), padded.data.data(), padded.size());
    else
      kernels::cmul(padded.data.data(), transfer_.data.data(), padded.data.data(), padded.size());
    fft::inverse(padded);
    f = crop_center(padded);
    return;
  }
  fft::forward(f);
  if (conjugate)
    kernels::cmul_conj(transfer_.data.data(), f.data.data(), f.data.data(), f.size());
  else
    kernels::cmul(f.data.data(), transfer_.data.data(), f.data.data(), f.size());
  fft::inverse(f);
}

void Propagator::apply(ComplexField& f) const { filtered(f, false); }
void Propagator::apply_adjoint(ComplexField& f) const { filtered(f, true); }

ComplexField propagate(const ComplexField& field, const PropagationSpec& spec) {
  Propagator prop(spec);
  ComplexField out = field;
  prop.apply(out);
  return out;
}

ComplexField propagate_adjoint(const ComplexField& field, const PropagationSpec& spec) {
  Propagator prop(spec);
  ComplexField out = field;
  prop.apply_adjoint(out);
  return out;
}

ComplexField propagate_direct(const ComplexField& field, const PropagationSpec& spec) {
  spec.validate();
  check_shape(field, spec, "propagate_direct");
  if (spec.zero_pad) {
    PropagationSpec eff = padded_spec(spec);
    check_oracle_cap(eff);
    ComplexField padded = embed_center(field);
    return crop_center(convolve_circular(padded, impulse_response_cached(eff)));
  }
  check_oracle_cap(spec);
  return convolve_circular(field, impulse_response_cached(spec));
}

}  // namespace d2nn
