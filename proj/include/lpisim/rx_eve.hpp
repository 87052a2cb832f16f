#pragma once

#include <cstddef>
#include <vector>

#include "lpisim/frame.hpp"
#include "lpisim/rx_legit.hpp"
#include "lpisim/types.hpp"
#include "lpisim/window.hpp"

namespace lpisim {

// None of the operations in this module take the LpiSecret: the passive
// receiver only ever sees the over-the-air samples and the (public) pilot
// cells of the transmit grid.

/// The grid cells at the pilot lattice, kept in lattice order.
struct PilotGrid {
  std::size_t n_pilot_subcarriers = 0;
  std::size_t n_pilot_symbols = 0;
  std::vector<cd> values;  // column-major like SymbolGrid
  PilotLattice lattice;

  cd& at(std::size_t i, std::size_t j) { return values[j * n_pilot_subcarriers + i]; }
  const cd& at(std::size_t i, std::size_t j) const { return values[j * n_pilot_subcarriers + i]; }
};

PilotGrid extract_pilot_grid(const SymbolGrid& grid, const PilotLattice& lattice);

/// Pilot-only range-Doppler processing without any secret compensation:
/// demodulate, divide pilot cells by the known pilot symbols, then windowed
/// IDFT/DFT on the decimated N_pil x M_pil grid.  Delay and Doppler both
/// fold into the reduced unambiguous spans of that grid.
RangeDopplerMap blind_pipeline(const TimeFrame& rx, const SymbolGrid& tx_grid,
                               const PilotLattice& lattice, const FrameConfig& cfg,
                               const WindowSpec& range_window, const WindowSpec& doppler_window,
                               const AxisConvention& axes = {});

/// Per-symbol phase read off the zero-delay (direct-path) range bin.
struct LosPhaseTrack {
  std::vector<double> phase_rad;  // one entry per pilot symbol
  bool weak_los = false;          // some symbol's bin 0 was not a clear peak
  std::size_t weak_symbols = 0;
};

/// arg(I[0, m]) per slow-time column of an (uncompensated) range profile.
/// Flags symbols whose bin-0 magnitude is below 10x the column's median bin
/// magnitude — without a dominant direct path the track is meaningless.
LosPhaseTrack track_los_phase(const RangeDopplerMap& range_profile);

/// blind_pipeline with an extra step: rotate each slow-time column by the
/// conjugate of the tracked direct-path phase before the Doppler transform.
/// Undoes symbol-wise impairment phases riding on a strong LoS; cannot help
/// against subcarrier-wise phases.
RangeDopplerMap smart_pipeline(const TimeFrame& rx, const SymbolGrid& tx_grid,
                               const PilotLattice& lattice, const FrameConfig& cfg,
                               const WindowSpec& range_window, const WindowSpec& doppler_window,
                               const AxisConvention& axes = {});

/// Symbol error rate over data cells after nearest-pilot equalization:
/// each data cell is divided by the raw channel estimate at the nearest
/// pilot cell (ties toward the lower index), then hard-decided.
double eve_demap_and_ser(const SymbolGrid& rx_grid, const SymbolGrid& tx_grid,
                         const PilotLattice& lattice);

}  // namespace lpisim
