#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lpisim/harness.hpp"
#include "lpisim/io.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<lpisim::Scenario> scenarios_from_flags(const std::string& config,
                                                   const std::string& preset) {
  if (!config.empty() && !preset.empty())
    throw lpisim::ConfigError("use either --config or --preset, not both");
  if (!config.empty()) return lpisim::load_scenarios(config);
  if (!preset.empty()) return lpisim::preset_scenarios(preset);
  throw lpisim::ConfigError("one of --config or --preset is required");
}

int run_simulate(const std::string& config, const std::string& preset, bool seed_set,
                 std::uint64_t seed, const std::string& out_dir, const std::string& format) {
  std::vector<lpisim::Scenario> scenarios = scenarios_from_flags(config, preset);
  for (lpisim::Scenario scenario : scenarios) {
    if (seed_set) scenario.secret_seed = seed;
    const lpisim::ScenarioOutput out = lpisim::run_scenario(scenario);

    const fs::path dir = fs::path(out_dir) / scenario.name;
    fs::create_directories(dir);
    if (format != "csv") lpisim::write_file(dir / "map.rdmap", lpisim::map_to_binary(out.map));
    if (format != "bin") {
      lpisim::write_file(dir / "map.csv", lpisim::map_to_csv(out.map));
      lpisim::write_file(dir / "velocity_cut.csv",
                         lpisim::velocity_cut_to_csv(out.map, out.metrics.peak.range_bin));
    }
    lpisim::write_file(dir / "metrics.json",
                       lpisim::metrics_to_json(out.metrics, scenario.name, scenario.secret_seed));
    std::cout << lpisim::metrics_to_json_line(out.metrics, scenario.name, scenario.secret_seed);
  }
  return 0;
}

int run_sweep(const std::string& config, const std::string& preset, std::size_t trials,
              const std::string& out_dir) {
  const std::vector<lpisim::Scenario> scenarios = scenarios_from_flags(config, preset);
  const lpisim::CampaignResult result = lpisim::run_campaign(scenarios, trials);
  fs::create_directories(out_dir);
  lpisim::write_file(fs::path(out_dir) / "trials.jsonl", lpisim::campaign_trials_to_jsonl(result));
  const std::string summary = lpisim::campaign_summary_to_json(result);
  lpisim::write_file(fs::path(out_dir) / "summary.json", summary);
  std::cout << summary;
  return 0;
}

int run_analyze(const std::string& map_path, double zero_velocity, int mainlobe_bins,
                int exclusion_bins, const std::string& out_path) {
  const lpisim::RangeDopplerMap map = lpisim::read_map_binary(map_path);
  lpisim::MaskSpec mask;
  mask.zero_velocity_halfwidth_mps = zero_velocity;
  mask.mainlobe_halfwidth_bins = mainlobe_bins;
  mask.peak_exclusion_halfwidth_bins = exclusion_bins;
  const lpisim::MetricsReport report = lpisim::compute_metrics(map, mask);
  const std::string text = lpisim::metrics_to_json(report, fs::path(map_path).stem().string(), 0);
  if (!out_path.empty()) lpisim::write_file(out_path, text);
  std::cout << text;
  return 0;
}

int run_goldens(const std::string& preset, const std::string& out_dir, bool verify) {
  const std::vector<lpisim::Scenario> scenarios = lpisim::preset_scenarios(preset);
  bool all_ok = true;
  for (const lpisim::Scenario& scenario : scenarios) {
    const fs::path dir = fs::path(out_dir) / scenario.name;
    if (verify) {
      std::cout << scenario.name << ":\n";
      all_ok = lpisim::verify_goldens(scenario, dir, std::cout) && all_ok;
    } else {
      lpisim::emit_goldens(scenario, dir);
      std::cout << "wrote " << dir.string() << "\n";
    }
  }
  if (verify && !all_ok) {
    std::cerr << "golden verification failed\n";
    return 3;
  }
  return 0;
}

int run_secret(const std::string& config, const std::string& preset, bool seed_set,
               std::uint64_t seed, const std::string& mode, const std::string& out_path,
               const std::string& inspect_path) {
  lpisim::Scenario scenario = scenarios_from_flags(config, preset).front();
  if (!inspect_path.empty()) {
    // Round-trips the record against this frame config and echoes it back.
    const lpisim::LpiSecret secret =
        lpisim::secret_from_json(lpisim::read_file(inspect_path), scenario.frame);
    std::cout << lpisim::secret_to_json(secret, scenario.frame);
    return 0;
  }
  if (seed_set) scenario.secret_seed = seed;
  lpisim::ImpairmentMode impairment = scenario.mode;
  if (!mode.empty()) impairment = lpisim::impairment_mode_from_name(mode);
  const lpisim::LpiSecret secret =
      lpisim::generate_secret(scenario.frame, impairment, scenario.secret_seed);
  const std::string text = lpisim::secret_to_json(secret, scenario.frame);
  if (!out_path.empty()) lpisim::write_file(out_path, text);
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic simulator for phase/Doppler-hopped OFDM joint radar-communication"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Run scenarios once; export maps and metrics");
  std::string sim_config, sim_preset, sim_out = "out", sim_format = "both";
  std::uint64_t sim_seed = 0;
  simulate->add_option("--config", sim_config, "Scenario config (JSON)");
  simulate->add_option("--preset", sim_preset, "Built-in scenario set: fig3, fig3-paper, golden");
  simulate->add_option("--seed", sim_seed, "Override every scenario's secret seed");
  simulate->add_option("--out-dir", sim_out, "Output directory")->capture_default_str();
  simulate->add_option("--format", sim_format, "Map export format")
      ->check(CLI::IsMember({"csv", "bin", "both"}))
      ->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Run seed campaigns; export trials and summaries");
  std::string sw_config, sw_preset, sw_out = "sweep";
  std::size_t sw_trials = 0;
  sweep->add_option("--config", sw_config, "Scenario config (JSON)");
  sweep->add_option("--preset", sw_preset, "Built-in scenario set: fig3, fig3-paper, golden");
  sweep->add_option("--trials", sw_trials, "Override the per-scenario trial count");
  sweep->add_option("--out-dir", sw_out, "Output directory")->capture_default_str();

  auto* analyze = app.add_subcommand("analyze", "Compute metrics for a stored binary map");
  std::string an_map, an_out;
  double an_zero = 5.0;
  int an_mainlobe = 0, an_exclusion = 0;
  analyze->add_option("--map", an_map, "Input map (.rdmap)")->required();
  analyze->add_option("--zero-velocity-halfwidth", an_zero, "Guard band half-width, m/s")
      ->capture_default_str();
  analyze->add_option("--mainlobe-bins", an_mainlobe,
                      "Mainlobe half-width in bins (0 = stored metadata)");
  analyze->add_option("--peak-exclusion-bins", an_exclusion,
                      "Peak exclusion half-width in bins (0 = 3x mainlobe)");
  analyze->add_option("--out", an_out, "Also write the metrics record here");

  auto* goldens = app.add_subcommand("goldens", "Emit or verify the golden output bundle");
  std::string go_preset = "golden", go_out = "goldens";
  bool go_verify = false;
  goldens->add_option("--preset", go_preset, "Scenario set to pin")->capture_default_str();
  goldens->add_option("--out-dir", go_out, "Bundle directory")->capture_default_str();
  goldens->add_flag("--verify", go_verify, "Compare a fresh run against the stored bundle");

  auto* secret = app.add_subcommand("secret", "Generate or inspect a secret record");
  std::string se_config, se_preset, se_mode, se_out, se_inspect;
  std::uint64_t se_seed = 0;
  secret->add_option("--config", se_config, "Scenario config supplying the numerology");
  secret->add_option("--preset", se_preset, "Preset supplying the numerology");
  secret->add_option("--seed", se_seed, "Secret seed");
  secret->add_option("--mode", se_mode, "Impairment mode: none, symbol_wise, subcarrier_wise");
  secret->add_option("--out", se_out, "Write the record here");
  secret->add_option("--inspect", se_inspect, "Validate and echo an existing record");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (simulate->parsed())
      return run_simulate(sim_config, sim_preset, simulate->count("--seed") > 0, sim_seed,
                          sim_out, sim_format);
    if (sweep->parsed()) return run_sweep(sw_config, sw_preset, sw_trials, sw_out);
    if (analyze->parsed()) return run_analyze(an_map, an_zero, an_mainlobe, an_exclusion, an_out);
    if (goldens->parsed()) return run_goldens(go_preset, go_out, go_verify);
    if (secret->parsed())
      return run_secret(se_config, se_preset, secret->count("--seed") > 0, se_seed, se_mode,
                        se_out, se_inspect);
  } catch (const lpisim::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const lpisim::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
