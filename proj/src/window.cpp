#include "lpisim/window.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <tuple>

namespace lpisim {
namespace {

// Chebyshev polynomial T_order evaluated on the whole real line.
double cheb_poly(std::size_t order, double x) {
  const double ord = static_cast<double>(order);
  if (x > 1.0) return std::cosh(ord * std::acosh(x));
  if (x < -1.0) {
    const double v = std::cosh(ord * std::acosh(-x));
    return (order % 2 != 0) ? -v : v;
  }
  return std::cos(ord * std::acos(x));
}

std::vector<double> make_chebyshev(std::size_t length, double atten_db) {
  if (length == 1) return {1.0};
  const std::size_t order = length - 1;
  const double ripple = std::pow(10.0, atten_db / 20.0);
  const double x0 = std::cosh(std::acosh(ripple) / static_cast<double>(order));

  // Equiripple magnitude response sampled at the L DFT frequencies.
  std::vector<double> freq(length);
  for (std::size_t k = 0; k < length; ++k)
    freq[k] = cheb_poly(order, x0 * std::cos(kPi * static_cast<double>(k) / static_cast<double>(length)));

  // Invert by direct cosine sums (the response is real and even).  Cosine
  // arguments are reduced with integer arithmetic so they stay in [0, 2 pi)
  // even at L ~ 1e4, where the naive 2*pi*k*j/L argument grows to ~1e5 rad
  // and costs ~5 digits.
  std::vector<double> w(length);
  if (length % 2 != 0) {
    std::vector<double> cos_table(length);
    for (std::size_t t = 0; t < length; ++t)
      cos_table[t] = std::cos(kTwoPi * static_cast<double>(t) / static_cast<double>(length));
    const std::size_t mid = (length - 1) / 2;
    for (std::size_t j = 0; j <= mid; ++j) {
      double acc = freq[0];
      for (std::size_t k = 1; k < length; ++k)
        acc += freq[k] * cos_table[(static_cast<std::uint64_t>(k) * j) % length];
      w[mid + j] = acc;
      w[mid - j] = acc;
    }
  } else {
    std::vector<double> cos_table(2 * length);
    for (std::size_t t = 0; t < 2 * length; ++t)
      cos_table[t] = std::cos(kPi * static_cast<double>(t) / static_cast<double>(length));
    const std::size_t half = length / 2;
    for (std::size_t j = 0; j < half; ++j) {
      double acc = freq[0];
      for (std::size_t k = 1; k < length; ++k)
        acc += freq[k] * cos_table[(static_cast<std::uint64_t>(k) * (2 * j + 1)) % (2 * length)];
      w[half + j] = acc;
      w[half - 1 - j] = acc;
    }
  }
  const double peak = *std::max_element(w.begin(), w.end());
  for (double& v : w) v /= peak;
  return w;
}

}  // namespace

void WindowSpec::validate() const {
  if (kind == WindowKind::chebyshev && !(sidelobe_db > 0.0))
    throw ConfigError("window: chebyshev sidelobe attenuation must be > 0 dB");
}

const std::vector<double>& WindowSpec::coefficients(std::size_t length) const {
  validate();
  if (length == 0) throw ConfigError("window: zero length");
  using Key = std::tuple<int, std::int64_t, std::size_t>;
  static std::map<Key, std::vector<double>> cache;
  const std::int64_t atten_key =
      kind == WindowKind::chebyshev ? static_cast<std::int64_t>(std::llround(sidelobe_db * 1e6)) : 0;
  const Key key{static_cast<int>(kind), atten_key, length};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<double> w;
  if (kind == WindowKind::rectangular)
    w.assign(length, 1.0);
  else
    w = make_chebyshev(length, sidelobe_db);
  return cache.emplace(key, std::move(w)).first->second;
}

int WindowSpec::mainlobe_halfwidth_bins(std::size_t length) const {
  validate();
  if (kind == WindowKind::rectangular || length < 3) return 1;
  // First null of the Dolph response: x0 cos(pi f / L) = cos(pi / (2 order)).
  const std::size_t order = length - 1;
  const double ripple = std::pow(10.0, sidelobe_db / 20.0);
  const double x0 = std::cosh(std::acosh(ripple) / static_cast<double>(order));
  const double arg = std::min(1.0, std::cos(kPi / (2.0 * static_cast<double>(order))) / x0);
  const double null_bin = static_cast<double>(length) / kPi * std::acos(arg);
  return std::max(1, static_cast<int>(std::ceil(null_bin - 1e-9)));
}

}  // namespace lpisim
