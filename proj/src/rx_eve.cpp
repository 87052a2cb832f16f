#include "lpisim/rx_eve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lpisim/fft.hpp"

namespace lpisim {
namespace {

// Pilot-domain channel estimate: demodulate and divide the pilot cells by
// the known pilot symbols.  This is all a pilot-only receiver can reference.
PilotGrid pilot_channel_estimate(const TimeFrame& rx, const SymbolGrid& tx_grid,
                                 const PilotLattice& lattice, const FrameConfig& cfg) {
  const SymbolGrid received = demodulate(rx, cfg);
  const PilotGrid rx_pilots = extract_pilot_grid(received, lattice);
  const PilotGrid tx_pilots = extract_pilot_grid(tx_grid, lattice);
  PilotGrid estimate = rx_pilots;
  for (std::size_t j = 0; j < estimate.n_pilot_symbols; ++j) {
    for (std::size_t i = 0; i < estimate.n_pilot_subcarriers; ++i) {
      const cd ref = tx_pilots.at(i, j);
      if (std::abs(ref) < 1e-6)
        throw ProcessingError("pilot channel estimate: degenerate pilot reference");
      estimate.at(i, j) = rx_pilots.at(i, j) / ref;
    }
  }
  return estimate;
}

// Reduced-grid range profile; reuses the full-grid transform through a
// SymbolGrid facade, with the decimation factors carried into the axes.
RangeDopplerMap eve_range_profile(PilotGrid estimate, const WindowSpec& range_window,
                                  const FrameConfig& cfg, const AxisConvention& axes) {
  SymbolGrid facade;
  facade.n_subcarriers = estimate.n_pilot_subcarriers;
  facade.n_symbols = estimate.n_pilot_symbols;
  facade.role = GridRole::channel_estimate;
  facade.cells = std::move(estimate.values);
  RangeDopplerMap profile =
      range_transform(facade, range_window, cfg, axes, estimate.lattice.spacing_freq);
  profile.pilot_grid = true;
  return profile;
}

}  // namespace

PilotGrid extract_pilot_grid(const SymbolGrid& grid, const PilotLattice& lattice) {
  if (lattice.pilot_subcarrier_indices.empty() || lattice.pilot_symbol_indices.empty())
    throw DimensionError("extract_pilot_grid: empty lattice");
  if (lattice.pilot_subcarrier_indices.back() >= grid.n_subcarriers ||
      lattice.pilot_symbol_indices.back() >= grid.n_symbols)
    throw DimensionError("extract_pilot_grid: lattice indices exceed the grid");

  PilotGrid pg;
  pg.n_pilot_subcarriers = lattice.n_pilot_subcarriers;
  pg.n_pilot_symbols = lattice.n_pilot_symbols;
  pg.lattice = lattice;
  pg.values.resize(pg.n_pilot_subcarriers * pg.n_pilot_symbols);
  for (std::size_t j = 0; j < pg.n_pilot_symbols; ++j)
    for (std::size_t i = 0; i < pg.n_pilot_subcarriers; ++i)
      pg.at(i, j) = grid.at(lattice.pilot_subcarrier_indices[i], lattice.pilot_symbol_indices[j]);
  return pg;
}

RangeDopplerMap blind_pipeline(const TimeFrame& rx, const SymbolGrid& tx_grid,
                               const PilotLattice& lattice, const FrameConfig& cfg,
                               const WindowSpec& range_window, const WindowSpec& doppler_window,
                               const AxisConvention& axes) {
  PilotGrid estimate = pilot_channel_estimate(rx, tx_grid, lattice, cfg);
  const RangeDopplerMap profile = eve_range_profile(std::move(estimate), range_window, cfg, axes);
  return doppler_transform(profile, doppler_window, cfg, axes, lattice.spacing_time);
}

LosPhaseTrack track_los_phase(const RangeDopplerMap& range_profile) {
  if (range_profile.stage != MapStage::range_profile)
    throw ProcessingError("track_los_phase: needs a pre-Doppler range profile");

  LosPhaseTrack track;
  track.phase_rad.resize(range_profile.n_doppler);
  std::vector<double> mags(range_profile.n_range);
  for (std::size_t m = 0; m < range_profile.n_doppler; ++m) {
    for (std::size_t r = 0; r < range_profile.n_range; ++r)
      mags[r] = std::abs(range_profile.at(r, m));
    std::vector<double> sorted = mags;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median =
        n % 2 != 0 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    const cd los_bin = range_profile.at(0, m);
    track.phase_rad[m] = std::arg(los_bin);
    if (std::abs(los_bin) < 10.0 * median) {
      track.weak_los = true;
      ++track.weak_symbols;
    }
  }
  return track;
}

RangeDopplerMap smart_pipeline(const TimeFrame& rx, const SymbolGrid& tx_grid,
                               const PilotLattice& lattice, const FrameConfig& cfg,
                               const WindowSpec& range_window, const WindowSpec& doppler_window,
                               const AxisConvention& axes) {
  PilotGrid estimate = pilot_channel_estimate(rx, tx_grid, lattice, cfg);
  RangeDopplerMap profile = eve_range_profile(std::move(estimate), range_window, cfg, axes);

  // Refocus: whatever phase the direct path carries per symbol (the
  // symbol-wise secret, channel phase, ...) is rotated out of the column.
  const LosPhaseTrack track = track_los_phase(profile);
  for (std::size_t m = 0; m < profile.n_doppler; ++m) {
    const cd rot = std::polar(1.0, -track.phase_rad[m]);
    for (std::size_t r = 0; r < profile.n_range; ++r) profile.at(r, m) *= rot;
  }
  return doppler_transform(profile, doppler_window, cfg, axes, lattice.spacing_time);
}

double eve_demap_and_ser(const SymbolGrid& rx_grid, const SymbolGrid& tx_grid,
                         const PilotLattice& lattice) {
  if (rx_grid.n_subcarriers != tx_grid.n_subcarriers || rx_grid.n_symbols != tx_grid.n_symbols)
    throw DimensionError("eve_demap_and_ser: rx/tx grid shapes differ");

  // Raw channel estimates at the pilot cells only.
  const std::size_t nk = lattice.n_pilot_subcarriers;
  const std::size_t nm = lattice.n_pilot_symbols;
  std::vector<cd> estimates(nk * nm);
  for (std::size_t j = 0; j < nm; ++j) {
    for (std::size_t i = 0; i < nk; ++i) {
      const std::size_t k = lattice.pilot_subcarrier_indices[i];
      const std::size_t m = lattice.pilot_symbol_indices[j];
      const cd ref = tx_grid.at(k, m);
      if (std::abs(ref) < 1e-6)
        throw ProcessingError("eve_demap_and_ser: degenerate pilot reference");
      estimates[j * nk + i] = rx_grid.at(k, m) / ref;
    }
  }

  const auto nearest = [](std::size_t x, std::size_t spacing, std::size_t count) {
    const std::size_t lo = std::min(x / spacing, count - 1);
    if (lo + 1 < count) {
      const std::size_t d_lo = x - lo * spacing;
      const std::size_t d_hi = (lo + 1) * spacing - x;
      if (d_hi < d_lo) return lo + 1;  // strict: ties go to the lower pilot
    }
    return lo;
  };

  std::size_t data_cells = 0;
  std::size_t errors = 0;
  for (std::size_t m = 0; m < tx_grid.n_symbols; ++m) {
    for (std::size_t k = 0; k < tx_grid.n_subcarriers; ++k) {
      if (lattice.is_pilot_cell(k, m)) continue;
      ++data_cells;
      const std::size_t i = nearest(k, lattice.spacing_freq, nk);
      const std::size_t j = nearest(m, lattice.spacing_time, nm);
      const cd est = estimates[j * nk + i];
      const cd eq = std::abs(est) < 1e-12 ? rx_grid.at(k, m) : rx_grid.at(k, m) / est;
      if (qpsk_decide(eq) != qpsk_decide(tx_grid.at(k, m))) ++errors;
    }
  }
  return data_cells == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(data_cells);
}

}  // namespace lpisim
