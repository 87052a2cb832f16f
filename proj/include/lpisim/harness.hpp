#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lpisim/channel.hpp"
#include "lpisim/frame.hpp"
#include "lpisim/impair.hpp"
#include "lpisim/metrics.hpp"
#include "lpisim/rx_eve.hpp"
#include "lpisim/rx_legit.hpp"
#include "lpisim/window.hpp"

namespace lpisim {

enum class ReceiverKind { legit, blind_eve, smart_eve };

std::string_view receiver_kind_name(ReceiverKind kind);
ReceiverKind receiver_kind_from_name(std::string_view name);

/// Everything that pins one end-to-end run: numerology, scene, impairment
/// mode (with per-stage toggles for ablations), receiver, windows, metric
/// mask, and the seeds.  The same window spec tapers both transform axes.
struct Scenario {
  std::string name = "scenario";
  FrameConfig frame;
  SceneConfig scene;
  ImpairmentMode mode = ImpairmentMode::subcarrier_wise;
  bool enable_phase = true;
  bool enable_doppler = true;
  ReceiverKind receiver = ReceiverKind::legit;
  WindowSpec window;
  MaskSpec mask;
  AxisConvention axes;
  std::uint64_t secret_seed = 1;
  std::uint64_t data_seed = 1;
  std::size_t n_trials = 1;
  // Evaluate metrics at the strongest scene target's true map bin (the
  // reference-reflector reading); false falls back to the masked argmax.
  bool anchor_peak_to_scene = true;
  bool residual_correction = true;

  void validate() const;
};

struct ScenarioOutput {
  RangeDopplerMap map;
  MetricsReport metrics;
  LpiSecret secret;
  TimeFrame transmitted;  // impaired over-the-air waveform
};

/// Run the full chain for one scenario.  Stage failures are rethrown with
/// the scenario name attached.
ScenarioOutput run_scenario(const Scenario& scenario);

/// Map bin where the strongest configured path should land, folding delay
/// and Doppler into the map's (possibly decimated) unambiguous spans.
/// A scene without targets anchors on the direct path.
PeakLocation expected_scene_peak(const Scenario& scenario, const RangeDopplerMap& map);

struct TrialRecord {
  std::uint64_t secret_seed = 0;
  std::uint64_t noise_seed = 0;
  MetricsReport metrics;
};

struct MetricStats {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

struct ScenarioSummary {
  std::string name;
  std::size_t n_trials = 0;
  MetricStats image_sinr_db, pslr_db, islr_db;
};

/// Order-independent summary (metrics are sorted before the quantiles).
ScenarioSummary summarize_trials(const std::string& name, const std::vector<TrialRecord>& records);

struct CampaignResult {
  std::vector<std::string> scenario_names;
  std::vector<std::vector<TrialRecord>> trials;  // [scenario][trial]
  std::vector<ScenarioSummary> summaries;
};

/// Run every scenario n_trials times; trial i re-seeds the secret and noise
/// streams with (base xor i).  0 keeps each scenario's own trial count.
CampaignResult run_campaign(const std::vector<Scenario>& scenarios,
                            std::size_t n_trials_override = 0);

std::string campaign_trials_to_jsonl(const CampaignResult& result);
std::string campaign_summary_to_json(const CampaignResult& result);

/// Write the golden bundle for a scenario: map.rdmap, map.csv,
/// velocity_cut.csv, waveform.wave1, secret.json, metrics.json.
void emit_goldens(const Scenario& scenario, const std::filesystem::path& dir);

/// Recompute the bundle and require byte-identical files; logs one line per
/// file and returns false on any mismatch or missing file.
bool verify_goldens(const Scenario& scenario, const std::filesystem::path& dir, std::ostream& log);

/// Built-in scenario sets:
///   "fig3"       desk-scale four-way comparison (legit / blind / smart on
///                symbol-wise / smart on subcarrier-wise)
///   "fig3-paper" the same comparison at full paper numerology (slow)
///   "golden"     small noisy legit scenario used for the golden bundle
std::vector<Scenario> preset_scenarios(const std::string& name);

std::vector<Scenario> scenarios_from_json(const std::string& text);
std::vector<Scenario> load_scenarios(const std::filesystem::path& config_path);

}  // namespace lpisim
