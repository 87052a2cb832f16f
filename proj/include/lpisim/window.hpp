#pragma once

#include <cstddef>
#include <vector>

#include "lpisim/types.hpp"

namespace lpisim {

enum class WindowKind { rectangular, chebyshev };

/// Taper applied along one axis before the range or Doppler transform.
struct WindowSpec {
  WindowKind kind = WindowKind::chebyshev;
  double sidelobe_db = 100.0;  // Chebyshev equiripple sidelobe attenuation

  void validate() const;

  /// Window coefficients for the given length, peak-normalized to 1.
  /// Chebyshev coefficients come from the closed-form Dolph frequency
  /// samples T_{L-1}(x0 cos(pi k / L)) inverted by an explicit cosine sum;
  /// the result matches scipy.signal.windows.chebwin to ~1e-13 (pinned in
  /// the tests).  Coefficients are cached per (kind, attenuation, length).
  const std::vector<double>& coefficients(std::size_t length) const;

  /// First-null halfwidth of the window's transform, in DFT bins:
  /// 1 for rectangular, ceil of the Dolph first null otherwise (4 bins at
  /// 100 dB for any practical length).  Drives mainlobe masking in metrics.
  int mainlobe_halfwidth_bins(std::size_t length) const;
};

}  // namespace lpisim
