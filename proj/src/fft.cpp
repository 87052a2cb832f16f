#include "lpisim/fft.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

namespace lpisim::fft {
namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

struct Radix2Plan {
  std::vector<std::size_t> bitrev;
  std::vector<cd> twiddle;  // exp(-j 2 pi k / n), k < n/2
};

// Plan caches are function-local statics; the library is single-threaded by
// design (determinism is easier to audit without concurrency).
const Radix2Plan& radix2_plan(std::size_t n) {
  static std::map<std::size_t, Radix2Plan> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Radix2Plan plan;
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  plan.bitrev.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rev = 0;
    for (std::size_t b = 0; b < bits; ++b) rev |= ((i >> b) & 1u) << (bits - 1 - b);
    plan.bitrev[i] = rev;
  }
  plan.twiddle.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k)
    plan.twiddle[k] = std::polar(1.0, -kTwoPi * static_cast<double>(k) / static_cast<double>(n));
  return cache.emplace(n, std::move(plan)).first->second;
}

void radix2_inplace(std::span<cd> a, bool inverse) {
  const std::size_t n = a.size();
  const Radix2Plan& plan = radix2_plan(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = plan.bitrev[i];
    if (j > i) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        cd w = plan.twiddle[k * stride];
        if (inverse) w = std::conj(w);
        const cd u = a[start + k];
        const cd t = a[start + k + half] * w;
        a[start + k] = u + t;
        a[start + k + half] = u - t;
      }
    }
  }
}

struct BluesteinPlan {
  std::size_t m = 0;          // power-of-two convolution length >= 2n-1
  std::vector<cd> chirp;      // b[k] = exp(+j pi k^2 / n), k < n
  std::vector<cd> kernel_fft; // FFT_m of the circularly embedded chirp
};

const BluesteinPlan& bluestein_plan(std::size_t n) {
  static std::map<std::size_t, BluesteinPlan> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  BluesteinPlan plan;
  plan.m = next_pow2(2 * n - 1);
  plan.chirp.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // Reduce k^2 mod 2n in integer arithmetic so the chirp argument never
    // exceeds 2 pi; direct k*k/n loses ~6 digits of phase at n ~ 1e4.
    const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
    plan.chirp[k] = std::polar(1.0, kPi * static_cast<double>(k2) / static_cast<double>(n));
  }
  std::vector<cd> kern(plan.m, cd{});
  kern[0] = plan.chirp[0];
  for (std::size_t k = 1; k < n; ++k) {
    kern[k] = plan.chirp[k];
    kern[plan.m - k] = plan.chirp[k];
  }
  radix2_inplace(kern, false);
  plan.kernel_fft = std::move(kern);
  return cache.emplace(n, std::move(plan)).first->second;
}

// Forward DFT of arbitrary length as a chirp-modulated circular convolution.
void bluestein_forward(std::span<const cd> in, std::span<cd> out) {
  const std::size_t n = in.size();
  const BluesteinPlan& plan = bluestein_plan(n);
  std::vector<cd> a(plan.m, cd{});
  for (std::size_t k = 0; k < n; ++k) a[k] = in[k] * std::conj(plan.chirp[k]);
  radix2_inplace(a, false);
  for (std::size_t i = 0; i < plan.m; ++i) a[i] *= plan.kernel_fft[i];
  radix2_inplace(a, true);
  const double inv_m = 1.0 / static_cast<double>(plan.m);
  for (std::size_t k = 0; k < n; ++k) out[k] = std::conj(plan.chirp[k]) * (a[k] * inv_m);
}

}  // namespace

void transform(std::span<const cd> in, std::span<cd> out, bool inverse) {
  if (in.size() != out.size()) throw DimensionError("fft: input/output lengths differ");
  const std::size_t n = in.size();
  if (n == 0) throw ConfigError("fft: zero-length transform");
  if (is_pow2(n)) {
    if (out.data() != in.data()) std::copy(in.begin(), in.end(), out.begin());
    radix2_inplace(out, inverse);
    return;
  }
  if (!inverse) {
    bluestein_forward(in, out);
    return;
  }
  // inverse = conj(forward(conj(x))), unnormalized on both sides.
  std::vector<cd> tmp(n);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = std::conj(in[i]);
  bluestein_forward(tmp, out);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::conj(out[i]);
}

void transform_inplace(std::span<cd> data, bool inverse) { transform(data, data, inverse); }

void unitary_forward(std::span<const cd> in, std::span<cd> out) {
  transform(in, out, false);
  const double s = 1.0 / std::sqrt(static_cast<double>(out.size()));
  for (auto& v : out) v *= s;
}

void unitary_inverse(std::span<const cd> in, std::span<cd> out) {
  transform(in, out, true);
  const double s = 1.0 / std::sqrt(static_cast<double>(out.size()));
  for (auto& v : out) v *= s;
}

}  // namespace lpisim::fft
