#pragma once

#include <cstddef>
#include <vector>

#include "lpisim/channel.hpp"
#include "lpisim/frame.hpp"
#include "lpisim/impair.hpp"
#include "lpisim/types.hpp"
#include "lpisim/window.hpp"

namespace lpisim {

/// Geometry conventions for the physical axes.  Defaults are monostatic:
/// range = c*tau/2 and v = c*f_D/(2 f_c); the false settings give the one-way
/// (bistatic forward-scatter) scaling without the factor 2.
struct AxisConvention {
  bool two_way_range = true;
  bool monostatic_velocity = true;

  double range_scale() const { return two_way_range ? 0.5 : 1.0; }
  double velocity_scale() const { return monostatic_velocity ? 0.5 : 1.0; }
};

enum class MapStage { range_profile, range_doppler };

/// Complex range(-Doppler) matrix with its physical axes and enough metadata
/// for the metrics (window mainlobe widths, grid provenance).
/// Until the Doppler transform runs (stage == range_profile) the second axis
/// is still the slow-time symbol index and velocity_axis_mps holds that index.
struct RangeDopplerMap {
  std::size_t n_range = 0;
  std::size_t n_doppler = 0;
  std::vector<cd> values;  // row-major: values[r * n_doppler + d]
  std::vector<double> range_axis_m;
  std::vector<double> velocity_axis_mps;

  MapStage stage = MapStage::range_profile;
  bool pilot_grid = false;  // true when built from Eve's decimated lattice
  WindowKind window_kind = WindowKind::rectangular;
  double window_sidelobe_db = 0.0;
  int range_mainlobe_halfwidth_bins = 1;
  int doppler_mainlobe_halfwidth_bins = 1;
  std::size_t doppler_center_bin = 0;  // bin of velocity 0 after the shift
  double range_bin_m = 0.0;
  double velocity_bin_mps = 0.0;

  cd& at(std::size_t r, std::size_t d) { return values[r * n_doppler + d]; }
  const cd& at(std::size_t r, std::size_t d) const { return values[r * n_doppler + d]; }
  double power(std::size_t r, std::size_t d) const { return std::norm(at(r, d)); }

  /// Power in dB, normalized so the strongest bin is 0 dB; bins below the
  /// global power floor are clamped before the log.
  std::vector<double> power_db() const;
};

/// Element-wise rx/tx on the full grid.  Throws if any reference cell is
/// smaller in magnitude than 1e-6 (QPSK cells are unit magnitude, so this
/// only trips on grids that were never meant as references).
SymbolGrid estimate_channel(const SymbolGrid& rx_grid, const SymbolGrid& tx_grid);

/// Windowed unitary IDFT down each column of D: delay profile per symbol.
/// freq_decimation > 1 records that rows sample every that-many subcarriers
/// (Eve's pilot grid), which scales the delay axis accordingly.
RangeDopplerMap range_transform(const SymbolGrid& d_grid, const WindowSpec& window,
                                const FrameConfig& cfg, const AxisConvention& axes = {},
                                std::size_t freq_decimation = 1);

/// Cancel the per-symbol delay-dependent phase left by removing the
/// artificial Doppler after the channel delay: bin (r, m) gains
/// exp(+j 2 pi f_m r T_s).  Exact at each scatterer's own delay bin.
RangeDopplerMap residual_correction(const RangeDopplerMap& profile, const LpiSecret& secret,
                                    const FrameConfig& cfg);

/// Windowed DFT along slow time plus fftshift; fills the velocity axis.
/// time_decimation > 1 records that columns sample every that-many symbols.
RangeDopplerMap doppler_transform(const RangeDopplerMap& profile, const WindowSpec& window,
                                  const FrameConfig& cfg, const AxisConvention& axes = {},
                                  std::size_t time_decimation = 1);

struct LegitOptions {
  bool residual_correction = true;  // off reproduces the mismatched-receiver ablation
  AxisConvention axes{};
};

/// Full shared-secret processing chain: remove the artificial Doppler,
/// demodulate, remove the phase grid, divide by the known transmit grid,
/// then range transform -> residual correction -> Doppler transform.
RangeDopplerMap legit_pipeline(const TimeFrame& rx, const SymbolGrid& tx_grid,
                               const LpiSecret& secret, const FrameConfig& cfg,
                               const WindowSpec& range_window, const WindowSpec& doppler_window,
                               const LegitOptions& options = {});

/// Channel estimates at the pilot cells interpolated to every cell: per pilot
/// symbol, IDFT the pilot-row samples to the delay domain and re-evaluate on
/// the full subcarrier grid (exact for delay spreads under N/spacing
/// samples); other symbols borrow the nearest pilot symbol's estimate.
SymbolGrid equalize_with_pilots(const SymbolGrid& rx_grid, const SymbolGrid& tx_grid,
                                const PilotLattice& lattice, const FrameConfig& cfg);

/// Hard-decision symbol error rate over the data (non-pilot) cells of an
/// equalized grid against the transmitted grid.  A lattice covering every
/// cell leaves no data to score and returns 0.
double demap_and_ser(const SymbolGrid& rx_equalized, const SymbolGrid& tx_grid,
                     const PilotLattice& lattice);

}  // namespace lpisim
