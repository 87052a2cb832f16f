#include "lpisim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <utility>

#include "json.hpp"
#include "lpisim/io.hpp"

namespace lpisim {

std::string_view receiver_kind_name(ReceiverKind kind) {
  switch (kind) {
    case ReceiverKind::legit: return "legit";
    case ReceiverKind::blind_eve: return "blind_eve";
    case ReceiverKind::smart_eve: return "smart_eve";
  }
  throw ConfigError("unknown receiver kind value");
}

ReceiverKind receiver_kind_from_name(std::string_view name) {
  if (name == "legit") return ReceiverKind::legit;
  if (name == "blind_eve") return ReceiverKind::blind_eve;
  if (name == "smart_eve") return ReceiverKind::smart_eve;
  throw ConfigError("unknown receiver kind \"" + std::string(name) + "\"");
}

void Scenario::validate() const {
  if (name.empty()) throw ConfigError("scenario: name must not be empty");
  frame.validate();
  scene.validate();
  window.validate();
  mask.validate();
  if (n_trials < 1) throw ConfigError("scenario: n_trials must be >= 1");
}

ScenarioOutput run_scenario(const Scenario& scenario) {
  scenario.validate();
  try {
    const PilotLattice lattice = build_pilot_lattice(scenario.frame);
    const SymbolGrid tx = generate_frame(scenario.frame, lattice, scenario.data_seed);
    const LpiSecret secret = generate_secret(scenario.frame, scenario.mode, scenario.secret_seed);

    TimeFrame transmitted;
    {
      const SymbolGrid impaired =
          scenario.enable_phase ? apply_phase(tx, secret) : tx;
      transmitted = modulate(impaired, scenario.frame);
    }
    if (scenario.enable_doppler)
      transmitted = apply_doppler(transmitted, secret, scenario.frame);
    const TimeFrame rx = propagate(transmitted, scenario.scene, scenario.frame);

    RangeDopplerMap map;
    switch (scenario.receiver) {
      case ReceiverKind::legit: {
        LegitOptions options;
        options.residual_correction = scenario.residual_correction;
        options.axes = scenario.axes;
        map = legit_pipeline(rx, tx, secret, scenario.frame, scenario.window, scenario.window,
                             options);
        break;
      }
      case ReceiverKind::blind_eve:
        map = blind_pipeline(rx, tx, lattice, scenario.frame, scenario.window, scenario.window,
                             scenario.axes);
        break;
      case ReceiverKind::smart_eve:
        map = smart_pipeline(rx, tx, lattice, scenario.frame, scenario.window, scenario.window,
                             scenario.axes);
        break;
    }

    std::optional<PeakLocation> anchor;
    if (scenario.anchor_peak_to_scene) anchor = expected_scene_peak(scenario, map);
    MetricsReport metrics = compute_metrics(map, scenario.mask, anchor);
    return {std::move(map), std::move(metrics), secret, std::move(transmitted)};
  } catch (const ProcessingError& e) {
    throw ProcessingError("scenario \"" + scenario.name + "\": " + e.what());
  } catch (const DimensionError& e) {
    throw DimensionError("scenario \"" + scenario.name + "\": " + e.what());
  }
}

PeakLocation expected_scene_peak(const Scenario& scenario, const RangeDopplerMap& map) {
  if (map.stage != MapStage::range_doppler)
    throw ProcessingError("expected_scene_peak: map has not been Doppler transformed");

  const Target* strongest = nullptr;
  for (const Target& t : scenario.scene.targets)
    if (strongest == nullptr || std::abs(t.gain) > std::abs(strongest->gain)) strongest = &t;

  std::size_t delay_samples = 0;
  double doppler_hz = 0.0;
  if (strongest != nullptr) {
    delay_samples = strongest->delay_samples(scenario.frame.sample_interval_s());
    doppler_hz = strongest->doppler_hz;
  }

  // Delay folds into the map's unambiguous span (decimated grids shrink it).
  const double delay_bin_s =
      map.range_bin_m / (kSpeedOfLight * scenario.axes.range_scale());
  const auto raw_range = static_cast<std::size_t>(std::llround(
      static_cast<double>(delay_samples) * scenario.frame.sample_interval_s() / delay_bin_s));
  const std::size_t range_bin = raw_range % map.n_range;

  const double doppler_bin_hz = map.velocity_bin_mps * scenario.frame.carrier_freq_hz /
                                (kSpeedOfLight * scenario.axes.velocity_scale());
  const long long q = std::llround(doppler_hz / doppler_bin_hz);
  const auto nd = static_cast<long long>(map.n_doppler);
  const long long folded =
      ((static_cast<long long>(map.doppler_center_bin) + q) % nd + nd) % nd;
  return {range_bin, static_cast<std::size_t>(folded)};
}

namespace {

// Quantile with linear interpolation between closest ranks, on sorted data.
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

MetricStats stats_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return {quantile_sorted(values, 0.50), quantile_sorted(values, 0.25),
          quantile_sorted(values, 0.75)};
}

}  // namespace

ScenarioSummary summarize_trials(const std::string& name,
                                 const std::vector<TrialRecord>& records) {
  if (records.empty()) throw ProcessingError("campaign: no trials to summarize");
  std::vector<double> sinr, pslr_v, islr_v;
  sinr.reserve(records.size());
  pslr_v.reserve(records.size());
  islr_v.reserve(records.size());
  for (const TrialRecord& r : records) {
    sinr.push_back(r.metrics.image_sinr_db);
    pslr_v.push_back(r.metrics.pslr_db);
    islr_v.push_back(r.metrics.islr_db);
  }
  ScenarioSummary summary;
  summary.name = name;
  summary.n_trials = records.size();
  summary.image_sinr_db = stats_of(std::move(sinr));
  summary.pslr_db = stats_of(std::move(pslr_v));
  summary.islr_db = stats_of(std::move(islr_v));
  return summary;
}

CampaignResult run_campaign(const std::vector<Scenario>& scenarios,
                            std::size_t n_trials_override) {
  if (scenarios.empty()) throw ConfigError("campaign: no scenarios to run");
  CampaignResult result;
  for (const Scenario& base : scenarios) {
    const std::size_t n = n_trials_override != 0 ? n_trials_override : base.n_trials;
    std::vector<TrialRecord> records;
    records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      Scenario trial = base;
      trial.secret_seed = base.secret_seed ^ static_cast<std::uint64_t>(i);
      trial.scene.noise_seed = base.scene.noise_seed ^ static_cast<std::uint64_t>(i);
      const ScenarioOutput out = run_scenario(trial);
      records.push_back({trial.secret_seed, trial.scene.noise_seed, out.metrics});
    }
    result.scenario_names.push_back(base.name);
    result.summaries.push_back(summarize_trials(base.name, records));
    result.trials.push_back(std::move(records));
  }
  return result;
}

std::string campaign_trials_to_jsonl(const CampaignResult& result) {
  std::string out;
  for (std::size_t s = 0; s < result.trials.size(); ++s)
    for (const TrialRecord& r : result.trials[s])
      out += metrics_to_json_line(r.metrics, result.scenario_names[s], r.secret_seed);
  return out;
}

std::string campaign_summary_to_json(const CampaignResult& result) {
  nlohmann::json root;
  root["scenarios"] = nlohmann::json::array();
  for (const ScenarioSummary& s : result.summaries) {
    const auto stats = [](const MetricStats& m) {
      return nlohmann::json{{"median", m.median}, {"q1", m.q1}, {"q3", m.q3}};
    };
    root["scenarios"].push_back({{"name", s.name},
                                 {"trials", s.n_trials},
                                 {"image_sinr_db", stats(s.image_sinr_db)},
                                 {"pslr_db", stats(s.pslr_db)},
                                 {"islr_db", stats(s.islr_db)}});
  }
  return root.dump(2) + "\n";
}

namespace {

struct GoldenEntry {
  const char* filename;
  std::string bytes;
};

std::vector<GoldenEntry> golden_bundle(const Scenario& scenario) {
  const ScenarioOutput out = run_scenario(scenario);
  std::vector<GoldenEntry> bundle;
  bundle.push_back({"map.rdmap", map_to_binary(out.map)});
  bundle.push_back({"map.csv", map_to_csv(out.map)});
  bundle.push_back({"velocity_cut.csv", velocity_cut_to_csv(out.map, out.metrics.peak.range_bin)});
  bundle.push_back({"waveform.wave1", waveform_to_binary(out.transmitted, scenario.frame)});
  bundle.push_back({"secret.json", secret_to_json(out.secret, scenario.frame)});
  bundle.push_back({"metrics.json", metrics_to_json(out.metrics, scenario.name, scenario.secret_seed)});
  return bundle;
}

}  // namespace

void emit_goldens(const Scenario& scenario, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const GoldenEntry& entry : golden_bundle(scenario))
    write_file(dir / entry.filename, entry.bytes);
}

bool verify_goldens(const Scenario& scenario, const std::filesystem::path& dir,
                    std::ostream& log) {
  bool all_ok = true;
  for (const GoldenEntry& entry : golden_bundle(scenario)) {
    std::string on_disk;
    bool ok = false;
    try {
      on_disk = read_file(dir / entry.filename);
      ok = on_disk == entry.bytes;
    } catch (const FormatError&) {
      ok = false;  // missing or unreadable counts as a mismatch
    }
    log << (ok ? "ok       " : "MISMATCH ") << entry.filename << "\n";
    all_ok = all_ok && ok;
  }
  return all_ok;
}

namespace {

Scenario desk_base() {
  Scenario sc;
  sc.frame.n_subcarriers = 256;
  sc.frame.n_symbols = 64;
  sc.frame.cp_length = 64;
  sc.frame.bandwidth_hz = 1e8;
  sc.frame.carrier_freq_hz = 2.7e10;
  sc.frame.pilot_spacing_freq = 2;
  sc.frame.pilot_spacing_time = 2;

  // Two reflectors on exact bins (Doppler bin = 4882.8125 Hz here) plus a
  // 20 dB direct path; noise-free so trial spread comes from the secret.
  const double ts = sc.frame.sample_interval_s();
  sc.scene.targets = {
      {std::polar(1.0, 0.4), 24.0 * ts, 6.0 * 4882.8125},
      {std::polar(0.8, -1.2), 47.0 * ts, -10.0 * 4882.8125},
  };
  sc.scene.los_gain = {10.0, 0.0};
  sc.scene.snr_db.reset();
  sc.scene.noise_seed = 5000;

  sc.window.kind = WindowKind::chebyshev;
  sc.window.sidelobe_db = 100.0;
  // The Doppler bin is 27.1 m/s at this numerology; 150 m/s puts the guard
  // band at +-5 bins, just past the 100 dB Chebyshev mainlobe.
  sc.mask.zero_velocity_halfwidth_mps = 150.0;
  sc.secret_seed = 1000;
  sc.data_seed = 7;
  sc.n_trials = 20;
  return sc;
}

Scenario paper_base() {
  Scenario sc = desk_base();
  sc.frame.n_subcarriers = 6756;
  sc.frame.n_symbols = 1024;
  sc.frame.cp_length = 3378;
  sc.frame.bandwidth_hz = 1e9;

  const double ts = sc.frame.sample_interval_s();
  const double doppler_bin = 1.0 / (1024.0 * sc.frame.symbol_duration_s());
  sc.scene.targets = {
      {std::polar(1.0, 0.4), 300.0 * ts, 40.0 * doppler_bin},
      {std::polar(0.8, -1.2), 800.0 * ts, -70.0 * doppler_bin},
  };
  sc.mask.zero_velocity_halfwidth_mps = 5.0;  // ~9 bins at this numerology
  sc.n_trials = 3;
  return sc;
}

std::vector<Scenario> four_way(const Scenario& base, const std::string& prefix) {
  Scenario legit = base;
  legit.name = prefix + "legit-subcarrier";
  legit.mode = ImpairmentMode::subcarrier_wise;
  legit.receiver = ReceiverKind::legit;

  Scenario blind = base;
  blind.name = prefix + "eve-blind-symbol";
  blind.mode = ImpairmentMode::symbol_wise;
  blind.receiver = ReceiverKind::blind_eve;

  Scenario smart_sym = base;
  smart_sym.name = prefix + "eve-smart-symbol";
  smart_sym.mode = ImpairmentMode::symbol_wise;
  smart_sym.receiver = ReceiverKind::smart_eve;

  Scenario smart_sub = base;
  smart_sub.name = prefix + "eve-smart-subcarrier";
  smart_sub.mode = ImpairmentMode::subcarrier_wise;
  smart_sub.receiver = ReceiverKind::smart_eve;

  return {legit, blind, smart_sym, smart_sub};
}

Scenario golden_scenario() {
  Scenario sc;
  sc.name = "golden-legit";
  sc.frame.n_subcarriers = 64;
  sc.frame.n_symbols = 32;
  sc.frame.cp_length = 16;
  sc.frame.bandwidth_hz = 1e8;
  sc.frame.carrier_freq_hz = 2.7e10;
  sc.frame.pilot_spacing_freq = 2;
  sc.frame.pilot_spacing_time = 2;

  const double ts = sc.frame.sample_interval_s();
  const double doppler_bin = 1.0 / (32.0 * sc.frame.symbol_duration_s());
  sc.scene.targets = {{std::polar(1.0, 0.7), 9.0 * ts, 2.0 * doppler_bin}};
  sc.scene.los_gain = {3.0, 0.0};
  // Finite SNR on purpose: the golden bundle then also pins the noise draws.
  sc.scene.snr_db = 30.0;
  sc.scene.noise_seed = 42;

  sc.mode = ImpairmentMode::subcarrier_wise;
  sc.receiver = ReceiverKind::legit;
  sc.window.kind = WindowKind::chebyshev;
  sc.window.sidelobe_db = 100.0;
  sc.secret_seed = 11;
  sc.data_seed = 3;
  sc.n_trials = 1;
  return sc;
}

}  // namespace

std::vector<Scenario> preset_scenarios(const std::string& name) {
  if (name == "fig3") return four_way(desk_base(), "");
  if (name == "fig3-paper") return four_way(paper_base(), "paper-");
  if (name == "golden") return {golden_scenario()};
  throw ConfigError("unknown preset \"" + name + "\"");
}

namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    if (!known) throw ConfigError("config: unknown key \"" + it.key() + "\" in " + where);
  }
}

cd parse_complex(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError("config: " + where + " must be a number or [re, im]");
}

Scenario parse_scenario(const json& j) {
  if (!j.is_object()) throw ConfigError("config: scenario must be an object");
  check_keys(j,
             {"name", "frame", "scene", "impairment", "receiver", "window", "mask", "axes",
              "seeds", "trials", "anchor_peak_to_scene", "residual_correction"},
             "scenario");
  Scenario sc;
  if (j.contains("name")) sc.name = j.at("name").get<std::string>();

  if (!j.contains("frame")) throw ConfigError("config: scenario needs a \"frame\" block");
  const json& f = j.at("frame");
  check_keys(f,
             {"n_subcarriers", "n_symbols", "cp_length", "bandwidth_hz", "carrier_freq_hz",
              "pilot_spacing_freq", "pilot_spacing_time", "modulation_order"},
             "frame");
  for (const char* key : {"n_subcarriers", "n_symbols", "bandwidth_hz", "carrier_freq_hz"})
    if (!f.contains(key)) throw ConfigError(std::string("config: frame needs \"") + key + "\"");
  sc.frame.n_subcarriers = f.at("n_subcarriers").get<std::size_t>();
  sc.frame.n_symbols = f.at("n_symbols").get<std::size_t>();
  sc.frame.cp_length = f.value("cp_length", std::size_t{0});
  sc.frame.bandwidth_hz = f.at("bandwidth_hz").get<double>();
  sc.frame.carrier_freq_hz = f.at("carrier_freq_hz").get<double>();
  sc.frame.pilot_spacing_freq = f.value("pilot_spacing_freq", std::size_t{1});
  sc.frame.pilot_spacing_time = f.value("pilot_spacing_time", std::size_t{1});
  sc.frame.modulation_order = f.value("modulation_order", 4u);

  if (j.contains("scene")) {
    const json& s = j.at("scene");
    check_keys(s, {"targets", "los_gain", "snr_db"}, "scene");
    if (s.contains("targets")) {
      if (!s.at("targets").is_array()) throw ConfigError("config: scene.targets must be an array");
      for (const json& t : s.at("targets")) {
        check_keys(t, {"gain", "delay_s", "doppler_hz"}, "target");
        Target target;
        target.gain = parse_complex(t.at("gain"), "target.gain");
        target.delay_s = t.at("delay_s").get<double>();
        target.doppler_hz = t.value("doppler_hz", 0.0);
        sc.scene.targets.push_back(target);
      }
    }
    if (s.contains("los_gain")) sc.scene.los_gain = parse_complex(s.at("los_gain"), "scene.los_gain");
    if (s.contains("snr_db") && !s.at("snr_db").is_null())
      sc.scene.snr_db = s.at("snr_db").get<double>();
  }

  if (j.contains("impairment")) {
    const json& im = j.at("impairment");
    check_keys(im, {"mode", "phase", "doppler"}, "impairment");
    if (im.contains("mode"))
      sc.mode = impairment_mode_from_name(im.at("mode").get<std::string>());
    sc.enable_phase = im.value("phase", true);
    sc.enable_doppler = im.value("doppler", true);
  }

  if (j.contains("receiver"))
    sc.receiver = receiver_kind_from_name(j.at("receiver").get<std::string>());

  if (j.contains("window")) {
    const json& w = j.at("window");
    check_keys(w, {"kind", "sidelobe_db"}, "window");
    if (w.contains("kind")) {
      const std::string kind = w.at("kind").get<std::string>();
      if (kind == "rectangular")
        sc.window.kind = WindowKind::rectangular;
      else if (kind == "chebyshev")
        sc.window.kind = WindowKind::chebyshev;
      else
        throw ConfigError("config: unknown window kind \"" + kind + "\"");
    }
    sc.window.sidelobe_db = w.value("sidelobe_db", 100.0);
  }

  if (j.contains("mask")) {
    const json& m = j.at("mask");
    check_keys(m,
               {"zero_velocity_halfwidth_mps", "mainlobe_halfwidth_bins",
                "peak_exclusion_halfwidth_bins"},
               "mask");
    sc.mask.zero_velocity_halfwidth_mps = m.value("zero_velocity_halfwidth_mps", 5.0);
    sc.mask.mainlobe_halfwidth_bins = m.value("mainlobe_halfwidth_bins", 0);
    sc.mask.peak_exclusion_halfwidth_bins = m.value("peak_exclusion_halfwidth_bins", 0);
  }

  if (j.contains("axes")) {
    const json& a = j.at("axes");
    check_keys(a, {"two_way_range", "monostatic_velocity"}, "axes");
    sc.axes.two_way_range = a.value("two_way_range", true);
    sc.axes.monostatic_velocity = a.value("monostatic_velocity", true);
  }

  if (j.contains("seeds")) {
    const json& s = j.at("seeds");
    check_keys(s, {"secret", "data", "noise"}, "seeds");
    sc.secret_seed = s.value("secret", std::uint64_t{1});
    sc.data_seed = s.value("data", std::uint64_t{1});
    sc.scene.noise_seed = s.value("noise", std::uint64_t{0});
  }

  sc.n_trials = j.value("trials", std::size_t{1});
  sc.anchor_peak_to_scene = j.value("anchor_peak_to_scene", true);
  sc.residual_correction = j.value("residual_correction", true);
  sc.validate();
  return sc;
}

}  // namespace

std::vector<Scenario> scenarios_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("config: ") + e.what());
  }

  std::vector<Scenario> scenarios;
  if (root.is_object() && root.contains("scenarios")) {
    check_keys(root, {"scenarios"}, "config root");
    if (!root.at("scenarios").is_array())
      throw ConfigError("config: \"scenarios\" must be an array");
    for (const json& j : root.at("scenarios")) scenarios.push_back(parse_scenario(j));
  } else if (root.is_array()) {
    for (const json& j : root) scenarios.push_back(parse_scenario(j));
  } else if (root.is_object()) {
    scenarios.push_back(parse_scenario(root));
  } else {
    throw ConfigError("config: expected a scenario object or a \"scenarios\" array");
  }
  if (scenarios.empty()) throw ConfigError("config: no scenarios defined");
  return scenarios;
}

std::vector<Scenario> load_scenarios(const std::filesystem::path& config_path) {
  return scenarios_from_json(read_file(config_path));
}

}  // namespace lpisim
