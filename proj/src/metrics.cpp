#include "lpisim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace lpisim {
namespace {

void require_full_map(const RangeDopplerMap& map) {
  if (map.stage != MapStage::range_doppler)
    throw ProcessingError("metrics: map has not been Doppler transformed yet");
  if (map.n_range == 0 || map.n_doppler == 0) throw ProcessingError("metrics: empty map");
}

void require_in_bounds(const RangeDopplerMap& map, PeakLocation peak) {
  if (peak.range_bin >= map.n_range || peak.doppler_bin >= map.n_doppler)
    throw ProcessingError("metrics: peak location outside the map");
}

int range_halfwidth(const RangeDopplerMap& map, const MaskSpec& mask) {
  return mask.mainlobe_halfwidth_bins > 0 ? mask.mainlobe_halfwidth_bins
                                          : map.range_mainlobe_halfwidth_bins;
}

int doppler_halfwidth(const RangeDopplerMap& map, const MaskSpec& mask) {
  return mask.mainlobe_halfwidth_bins > 0 ? mask.mainlobe_halfwidth_bins
                                          : map.doppler_mainlobe_halfwidth_bins;
}

int exclusion_halfwidth(int mainlobe_hw, const MaskSpec& mask) {
  return mask.peak_exclusion_halfwidth_bins > 0 ? mask.peak_exclusion_halfwidth_bins
                                                : 3 * mainlobe_hw;
}

std::vector<char> guard_band_columns(const RangeDopplerMap& map, const MaskSpec& mask) {
  std::vector<char> masked(map.n_doppler, 0);
  for (std::size_t d = 0; d < map.n_doppler; ++d)
    masked[d] = std::abs(map.velocity_axis_mps[d]) <= mask.zero_velocity_halfwidth_mps ? 1 : 0;
  return masked;
}

// Both map axes are DFT bins, so exclusion boxes wrap around the edges.
void mark_box(std::vector<char>& excluded, const RangeDopplerMap& map, PeakLocation center,
              int halfwidth_r, int halfwidth_d) {
  const auto nr = static_cast<std::ptrdiff_t>(map.n_range);
  const auto nd = static_cast<std::ptrdiff_t>(map.n_doppler);
  for (std::ptrdiff_t dr = -halfwidth_r; dr <= halfwidth_r; ++dr) {
    const std::ptrdiff_t r = (static_cast<std::ptrdiff_t>(center.range_bin) + dr % nr + nr) % nr;
    for (std::ptrdiff_t dd = -halfwidth_d; dd <= halfwidth_d; ++dd) {
      const std::ptrdiff_t d =
          (static_cast<std::ptrdiff_t>(center.doppler_bin) + dd % nd + nd) % nd;
      excluded[static_cast<std::size_t>(r * nd + d)] = 1;
    }
  }
}

std::size_t circular_distance(std::size_t a, std::size_t b, std::size_t n) {
  const std::size_t diff = a > b ? a - b : b - a;
  return std::min(diff, n - diff);
}

struct Cut {
  std::vector<double> power;
  std::size_t center = 0;  // the cut's own argmax
  int halfwidth = 0;
};

Cut velocity_cut(const RangeDopplerMap& map, PeakLocation peak, const MaskSpec& mask) {
  require_full_map(map);
  mask.validate();
  require_in_bounds(map, peak);
  Cut cut;
  cut.power.resize(map.n_doppler);
  for (std::size_t d = 0; d < map.n_doppler; ++d) cut.power[d] = map.power(peak.range_bin, d);
  cut.halfwidth = doppler_halfwidth(map, mask);
  if (2 * static_cast<std::size_t>(cut.halfwidth) + 1 >= map.n_doppler)
    throw ProcessingError("metrics: mainlobe wider than the velocity cut");
  cut.center = static_cast<std::size_t>(
      std::max_element(cut.power.begin(), cut.power.end()) - cut.power.begin());
  return cut;
}

}  // namespace

void MaskSpec::validate() const {
  if (zero_velocity_halfwidth_mps < 0.0)
    throw ConfigError("mask: zero-velocity halfwidth must be >= 0");
  if (mainlobe_halfwidth_bins < 0 || peak_exclusion_halfwidth_bins < 0)
    throw ConfigError("mask: bin halfwidths must be >= 0");
}

PeakLocation find_strongest_target(const RangeDopplerMap& map, const MaskSpec& mask) {
  require_full_map(map);
  mask.validate();
  const std::vector<char> guarded = guard_band_columns(map, mask);

  PeakLocation best;
  double best_power = -1.0;
  for (std::size_t r = 0; r < map.n_range; ++r) {
    for (std::size_t d = 0; d < map.n_doppler; ++d) {
      if (guarded[d]) continue;
      const double p = map.power(r, d);
      if (p > best_power) {
        best_power = p;
        best = {r, d};
      }
    }
  }
  if (best_power < 0.0)
    throw ProcessingError("find_strongest_target: the zero-velocity band masks every column");
  return best;
}

double image_sinr(const RangeDopplerMap& map, PeakLocation peak, const MaskSpec& mask) {
  require_full_map(map);
  mask.validate();
  require_in_bounds(map, peak);

  const int ex_r = exclusion_halfwidth(range_halfwidth(map, mask), mask);
  const int ex_d = exclusion_halfwidth(doppler_halfwidth(map, mask), mask);

  std::vector<char> excluded(map.n_range * map.n_doppler, 0);
  const std::vector<char> guarded = guard_band_columns(map, mask);
  for (std::size_t r = 0; r < map.n_range; ++r)
    for (std::size_t d = 0; d < map.n_doppler; ++d)
      if (guarded[d]) excluded[r * map.n_doppler + d] = 1;
  mark_box(excluded, map, peak, ex_r, ex_d);

  // Median of what is left sets the threshold for further bright spots.
  std::vector<double> rest;
  rest.reserve(map.values.size());
  for (std::size_t i = 0; i < map.values.size(); ++i)
    if (!excluded[i]) rest.push_back(std::norm(map.values[i]));
  if (rest.empty()) throw ProcessingError("image_sinr: noise region is empty");
  const std::size_t mid = rest.size() / 2;
  std::nth_element(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(mid), rest.end());
  double median = rest[mid];
  if (rest.size() % 2 == 0) {
    const double lower =
        *std::max_element(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  const double threshold = median * 100.0;  // median + 20 dB

  // Greedily box out residual bright spots (other reflectors, their
  // mainlobe skirts).  The cap is defensive; scenes hold a few reflectors.
  for (int iter = 0; iter < 64; ++iter) {
    double max_power = -1.0;
    PeakLocation argmax;
    for (std::size_t r = 0; r < map.n_range; ++r) {
      for (std::size_t d = 0; d < map.n_doppler; ++d) {
        if (excluded[r * map.n_doppler + d]) continue;
        const double p = map.power(r, d);
        if (p > max_power) {
          max_power = p;
          argmax = {r, d};
        }
      }
    }
    if (max_power <= threshold) break;
    mark_box(excluded, map, argmax, ex_r, ex_d);
  }

  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    if (excluded[i]) continue;
    sum += std::norm(map.values[i]);
    ++count;
  }
  if (count == 0) throw ProcessingError("image_sinr: every bin ended up excluded");

  const double noise = std::max(sum / static_cast<double>(count), kPowerFloor);
  const double peak_power = std::max(map.power(peak.range_bin, peak.doppler_bin), kPowerFloor);
  return 10.0 * std::log10(peak_power / noise);
}

double pslr(const RangeDopplerMap& map, PeakLocation peak, const MaskSpec& mask) {
  const Cut cut = velocity_cut(map, peak, mask);
  const double peak_power = cut.power[cut.center];
  double max_sidelobe = 0.0;
  for (std::size_t d = 0; d < cut.power.size(); ++d) {
    if (circular_distance(d, cut.center, cut.power.size()) <=
        static_cast<std::size_t>(cut.halfwidth))
      continue;
    max_sidelobe = std::max(max_sidelobe, cut.power[d]);
  }
  if (peak_power <= 0.0 || max_sidelobe <= 0.0) return kDbFloor;
  return std::max(kDbFloor, 10.0 * std::log10(max_sidelobe / peak_power));
}

double islr(const RangeDopplerMap& map, PeakLocation peak, const MaskSpec& mask) {
  const Cut cut = velocity_cut(map, peak, mask);
  double mainlobe = 0.0;
  double sidelobes = 0.0;
  for (std::size_t d = 0; d < cut.power.size(); ++d) {
    if (circular_distance(d, cut.center, cut.power.size()) <=
        static_cast<std::size_t>(cut.halfwidth))
      mainlobe += cut.power[d];
    else
      sidelobes += cut.power[d];
  }
  if (mainlobe <= 0.0) throw ProcessingError("islr: the cut holds no energy");
  if (sidelobes <= 0.0) return kDbFloor;
  return std::max(kDbFloor, 10.0 * std::log10(sidelobes / mainlobe));
}

MetricsReport compute_metrics(const RangeDopplerMap& map, const MaskSpec& mask,
                              std::optional<PeakLocation> anchor) {
  const PeakLocation peak = anchor.has_value() ? *anchor : find_strongest_target(map, mask);
  require_in_bounds(map, peak);
  MetricsReport report;
  report.peak = peak;
  report.mask = mask;
  report.image_sinr_db = image_sinr(map, peak, mask);
  report.pslr_db = pslr(map, peak, mask);
  report.islr_db = islr(map, peak, mask);
  report.peak_range_m = map.range_axis_m[peak.range_bin];
  report.peak_velocity_mps = map.velocity_axis_mps[peak.doppler_bin];
  return report;
}

}  // namespace lpisim
