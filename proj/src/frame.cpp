#include "lpisim/frame.hpp"

#include <algorithm>
#include <cmath>

#include "lpisim/fft.hpp"
#include "lpisim/rng.hpp"

namespace lpisim {

void FrameConfig::validate() const {
  if (n_subcarriers < 2) throw ConfigError("frame: need at least 2 subcarriers");
  if (n_symbols < 1) throw ConfigError("frame: need at least 1 symbol");
  if (cp_length >= n_subcarriers) throw ConfigError("frame: cyclic prefix must be shorter than the symbol core");
  if (!(bandwidth_hz > 0.0)) throw ConfigError("frame: bandwidth must be positive");
  if (!(carrier_freq_hz > 0.0)) throw ConfigError("frame: carrier frequency must be positive");
  if (pilot_spacing_freq < 1 || pilot_spacing_time < 1)
    throw ConfigError("frame: pilot spacings must be >= 1");
  if (modulation_order != 4) throw ConfigError("frame: only QPSK (order 4) is supported");
}

std::size_t nominal_pilot_count(std::size_t dim, std::size_t spacing) {
  if (spacing == 0) throw ConfigError("pilot lattice: spacing must be >= 1");
  return dim / spacing + 1;
}

PilotLattice build_pilot_lattice(const FrameConfig& cfg) {
  cfg.validate();
  PilotLattice lat;
  lat.spacing_freq = cfg.pilot_spacing_freq;
  lat.spacing_time = cfg.pilot_spacing_time;
  for (std::size_t k = 0; k < cfg.n_subcarriers; k += cfg.pilot_spacing_freq)
    lat.pilot_subcarrier_indices.push_back(k);
  for (std::size_t m = 0; m < cfg.n_symbols; m += cfg.pilot_spacing_time)
    lat.pilot_symbol_indices.push_back(m);
  lat.n_pilot_subcarriers = lat.pilot_subcarrier_indices.size();
  lat.n_pilot_symbols = lat.pilot_symbol_indices.size();
  return lat;
}

cd qpsk_point(unsigned index) {
  constexpr double kInvSqrt2 = 0.7071067811865475244008443621;
  const double re = (index & 1u) ? -kInvSqrt2 : kInvSqrt2;
  const double im = (index & 2u) ? -kInvSqrt2 : kInvSqrt2;
  return {re, im};
}

unsigned qpsk_decide(cd value) {
  return (std::signbit(value.real()) ? 1u : 0u) | (std::signbit(value.imag()) ? 2u : 0u);
}

SymbolGrid generate_frame(const FrameConfig& cfg, const PilotLattice& lattice, std::uint64_t seed) {
  cfg.validate();
  SymbolGrid grid(cfg.n_subcarriers, cfg.n_symbols, GridRole::transmit);

  // Pilots first, from their own stream, so the pilot sequence depends only
  // on the seed and the lattice — never on how much payload surrounds it.
  rng::Stream pilot_rng(rng::derive(seed, rng::kPilotStream));
  for (std::size_t k : lattice.pilot_subcarrier_indices)
    for (std::size_t m : lattice.pilot_symbol_indices) grid.at(k, m) = qpsk_point(pilot_rng.bits2());

  rng::Stream data_rng(rng::derive(seed, rng::kDataStream));
  for (std::size_t k = 0; k < cfg.n_subcarriers; ++k)
    for (std::size_t m = 0; m < cfg.n_symbols; ++m)
      if (!lattice.is_pilot_cell(k, m)) grid.at(k, m) = qpsk_point(data_rng.bits2());
  return grid;
}

TimeFrame modulate(const SymbolGrid& grid, const FrameConfig& cfg) {
  cfg.validate();
  if (grid.n_subcarriers != cfg.n_subcarriers || grid.n_symbols != cfg.n_symbols)
    throw DimensionError("modulate: grid shape does not match the frame config");

  TimeFrame tf(cfg.n_symbols, cfg.block_length());
  std::vector<cd> core(cfg.n_subcarriers);
  for (std::size_t m = 0; m < cfg.n_symbols; ++m) {
    fft::unitary_inverse(grid.symbol(m), core);
    auto block = tf.block(m);
    std::copy(core.end() - static_cast<std::ptrdiff_t>(cfg.cp_length), core.end(), block.begin());
    std::copy(core.begin(), core.end(), block.begin() + static_cast<std::ptrdiff_t>(cfg.cp_length));
  }
  return tf;
}

SymbolGrid demodulate(const TimeFrame& tf, const FrameConfig& cfg) {
  cfg.validate();
  if (tf.n_symbols != cfg.n_symbols || tf.block_length != cfg.block_length())
    throw DimensionError("demodulate: time frame shape does not match the frame config");

  SymbolGrid grid(cfg.n_subcarriers, cfg.n_symbols, GridRole::received);
  for (std::size_t m = 0; m < cfg.n_symbols; ++m) {
    const auto block = tf.block(m);
    fft::unitary_forward(block.subspan(cfg.cp_length), grid.symbol(m));
  }
  return grid;
}

}  // namespace lpisim
