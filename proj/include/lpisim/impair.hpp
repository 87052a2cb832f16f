#pragma once

#include <cstdint>
#include <vector>

#include "lpisim/frame.hpp"
#include "lpisim/types.hpp"

namespace lpisim {

enum class ImpairmentMode { none, symbol_wise, subcarrier_wise };

/// The transmitter-side secret shared with the legitimate receiver: a phase
/// rotation per grid cell plus an artificial Doppler shift per symbol.
struct LpiSecret {
  ImpairmentMode mode = ImpairmentMode::none;
  std::size_t n_subcarriers = 0;
  std::size_t n_symbols = 0;
  std::vector<double> phase;       // column-major N x M, radians in (-pi, pi]
  std::vector<double> doppler_hz;  // length M, each in [-df/2, df/2]
  std::uint64_t seed = 0;

  double& phase_at(std::size_t k, std::size_t m) { return phase[m * n_subcarriers + k]; }
  double phase_at(std::size_t k, std::size_t m) const { return phase[m * n_subcarriers + k]; }
};

/// Draw the secret for one frame.  Phases come first (row-major over the
/// grid; symbol_wise draws one phase per symbol and broadcasts it down the
/// column; none leaves zeros), then the M Doppler shifts — so the Doppler
/// sequence for a given seed is the same in both impairment modes.
LpiSecret generate_secret(const FrameConfig& cfg, ImpairmentMode mode, std::uint64_t seed);

/// Multiply each cell by exp(+j phase); remove_phase applies the conjugate.
SymbolGrid apply_phase(const SymbolGrid& grid, const LpiSecret& secret);
SymbolGrid remove_phase(const SymbolGrid& grid, const LpiSecret& secret);

/// Multiply block m by exp(+j 2 pi f_m n T_s), the sample index n restarting
/// at 0 at each block boundary (prefix included) — the phase ramp is pinned
/// to the symbol, unlike a physical Doppler which accrues across the frame.
TimeFrame apply_doppler(const TimeFrame& tf, const LpiSecret& secret, const FrameConfig& cfg);
TimeFrame remove_doppler(const TimeFrame& tf, const LpiSecret& secret, const FrameConfig& cfg);

}  // namespace lpisim
