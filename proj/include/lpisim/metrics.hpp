#pragma once

#include <cstddef>
#include <optional>

#include "lpisim/rx_legit.hpp"
#include "lpisim/types.hpp"

namespace lpisim {

/// Exclusion geometry for peak search and the image-SINR noise region.
/// Zero values for the bin fields mean "take it from the map's metadata":
/// mainlobe halfwidth from the window, peak exclusion = 3x the mainlobe.
struct MaskSpec {
  double zero_velocity_halfwidth_mps = 5.0;  // stationary-clutter guard band
  int mainlobe_halfwidth_bins = 0;
  int peak_exclusion_halfwidth_bins = 0;

  void validate() const;
};

struct PeakLocation {
  std::size_t range_bin = 0;
  std::size_t doppler_bin = 0;
};

struct MetricsReport {
  double image_sinr_db = 0.0;
  double pslr_db = 0.0;
  double islr_db = 0.0;
  PeakLocation peak;
  double peak_range_m = 0.0;
  double peak_velocity_mps = 0.0;
  MaskSpec mask;
};

/// Strongest bin outside the zero-velocity guard band.  Throws if the band
/// covers the whole map.
PeakLocation find_strongest_target(const RangeDopplerMap& map, const MaskSpec& mask);

/// Peak power over the mean power of the noise region.  The noise region
/// excludes the guard band, a peak-exclusion box around the given peak, and
/// boxes around any further bins that exceed the remaining median by 20 dB
/// (found greedily, so one target's sidelobe skirt never hides another).
double image_sinr(const RangeDopplerMap& map, PeakLocation peak, const MaskSpec& mask);

/// Peak-to-sidelobe ratio (dB, <= 0) of the velocity cut through the peak's
/// range row.  The mainlobe is centred on the cut's own argmax so the metric
/// is invariant to circular shifts of the cut; its halfwidth comes from the
/// mask or the map's Doppler window metadata.
double pslr(const RangeDopplerMap& map, PeakLocation peak, const MaskSpec& mask);

/// Integrated sidelobe-to-mainlobe energy ratio (dB) of the same cut,
/// clamped at the global dB floor when the sidelobes hold no energy.
double islr(const RangeDopplerMap& map, PeakLocation peak, const MaskSpec& mask);

/// All three metrics at the given peak (or at find_strongest_target when no
/// anchor is supplied), plus the peak's physical coordinates.
MetricsReport compute_metrics(const RangeDopplerMap& map, const MaskSpec& mask,
                              std::optional<PeakLocation> anchor = std::nullopt);

}  // namespace lpisim
