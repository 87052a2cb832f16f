#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lpisim/types.hpp"

namespace lpisim {

/// OFDM numerology shared by every stage of the chain.
struct FrameConfig {
  std::size_t n_subcarriers = 0;       // N
  std::size_t n_symbols = 0;           // M
  std::size_t cp_length = 0;           // cyclic prefix, samples
  double bandwidth_hz = 0.0;           // B (also the complex sample rate)
  double carrier_freq_hz = 0.0;        // f_c
  std::size_t pilot_spacing_freq = 1;  // subcarriers between pilot rows
  std::size_t pilot_spacing_time = 1;  // symbols between pilot columns
  unsigned modulation_order = 4;       // QPSK is the only supported order

  double subcarrier_spacing_hz() const { return bandwidth_hz / static_cast<double>(n_subcarriers); }
  double sample_interval_s() const { return 1.0 / bandwidth_hz; }
  std::size_t block_length() const { return n_subcarriers + cp_length; }
  double symbol_duration_s() const { return static_cast<double>(block_length()) * sample_interval_s(); }

  void validate() const;
};

enum class GridRole { transmit, received, channel_estimate };

/// N x M complex grid; column m holds the N subcarrier cells of symbol m.
struct SymbolGrid {
  std::size_t n_subcarriers = 0;
  std::size_t n_symbols = 0;
  GridRole role = GridRole::transmit;
  std::vector<cd> cells;  // column-major: cells[m * n_subcarriers + k]

  SymbolGrid() = default;
  SymbolGrid(std::size_t n, std::size_t m, GridRole r)
      : n_subcarriers(n), n_symbols(m), role(r), cells(n * m) {}

  cd& at(std::size_t k, std::size_t m) { return cells[m * n_subcarriers + k]; }
  const cd& at(std::size_t k, std::size_t m) const { return cells[m * n_subcarriers + k]; }
  std::span<cd> symbol(std::size_t m) { return {cells.data() + m * n_subcarriers, n_subcarriers}; }
  std::span<const cd> symbol(std::size_t m) const {
    return {cells.data() + m * n_subcarriers, n_subcarriers};
  }
};

/// Pilot positions: the Cartesian product of the two index lists.  Indices
/// are the in-range multiples of the configured spacings.
struct PilotLattice {
  std::vector<std::size_t> pilot_subcarrier_indices;
  std::vector<std::size_t> pilot_symbol_indices;
  std::size_t n_pilot_subcarriers = 0;  // == pilot_subcarrier_indices.size()
  std::size_t n_pilot_symbols = 0;
  std::size_t spacing_freq = 1;
  std::size_t spacing_time = 1;

  bool is_pilot_cell(std::size_t k, std::size_t m) const {
    return k % spacing_freq == 0 && m % spacing_time == 0;
  }
};

/// M blocks of (cp_length + N) time samples, symbol 0 first.
struct TimeFrame {
  std::size_t n_symbols = 0;
  std::size_t block_length = 0;
  std::vector<cd> samples;  // blocks back to back

  TimeFrame() = default;
  TimeFrame(std::size_t m, std::size_t bl) : n_symbols(m), block_length(bl), samples(m * bl) {}

  std::span<cd> block(std::size_t m) { return {samples.data() + m * block_length, block_length}; }
  std::span<const cd> block(std::size_t m) const {
    return {samples.data() + m * block_length, block_length};
  }
};

/// Fence-post pilot count floor(dim/spacing) + 1 before range clamping.
/// Exceeds the usable count by one exactly when spacing divides dim.
std::size_t nominal_pilot_count(std::size_t dim, std::size_t spacing);

PilotLattice build_pilot_lattice(const FrameConfig& cfg);

/// Fill a transmit grid with unit-power QPSK cells.  Pilot cells draw from a
/// pilot sub-stream, data cells from a data sub-stream (each row-major over
/// its own cell set), so both sequences are reproducible independently.
SymbolGrid generate_frame(const FrameConfig& cfg, const PilotLattice& lattice, std::uint64_t seed);

/// Per-symbol unitary IDFT plus cyclic prefix (last cp_length IFFT samples).
TimeFrame modulate(const SymbolGrid& grid, const FrameConfig& cfg);

/// Drop each block's prefix and take the unitary DFT of the remaining N.
SymbolGrid demodulate(const TimeFrame& tf, const FrameConfig& cfg);

/// QPSK constellation at unit magnitude, Gray-coded quadrants:
/// bit 0 flips the real sign, bit 1 the imaginary sign.
cd qpsk_point(unsigned index);
unsigned qpsk_decide(cd value);

}  // namespace lpisim
