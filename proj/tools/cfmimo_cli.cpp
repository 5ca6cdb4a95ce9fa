// Command-line driver: runs figure presets and writes CSV results.

#include <chrono>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cfmimo/cli_io.hpp"

using namespace cfmimo;

namespace {

std::vector<Scheme> parse_scheme_list(const std::string& csv) {
  std::vector<Scheme> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto comma = csv.find(',', start);
    const std::string item = csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(Scheme::parse(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty scheme list; valid: " + valid_scheme_names());
  return out;
}

ProgressFn progress_printer(const std::string& label) {
  return [label, last = -1](int done, int total) mutable {
    const int pct = total ? 100 * done / total : 100;
    if (pct == last && done != total) return;
    last = pct;
    std::cerr << "\r" << label << ": " << done << "/" << total << " trials" << std::flush;
    if (done == total) std::cerr << "\n";
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell-free massive MIMO downlink simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a preset and write its CSV");
  std::string config_path, preset_name, out_path, schemes_csv;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  run->add_option("--config", config_path, "key = value overrides applied on top of the preset")
      ->check(CLI::ExistingFile);
  run->add_option("--preset", preset_name, "preset name (see list-presets)")->required();
  run->add_option("--out", out_path, "output CSV path")->required();
  run->add_option("--trials", trials, "number of channel realizations");
  run->add_option("--seed", seed, "base RNG seed");
  run->add_option("--schemes", schemes_csv, "comma-separated schemes, e.g. MMSE+OPA+LS,ZF+OPA+LS");

  auto* list = app.add_subcommand("list-presets", "print the preset names");

  auto* validate = app.add_subcommand("validate", "check a config file (or a preset)");
  std::string validate_config, validate_preset;
  validate->add_option("--config", validate_config, "config file")->check(CLI::ExistingFile);
  validate->add_option("--preset", validate_preset, "use this preset as the base");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*list) {
      for (const auto& p : presets()) std::cout << p.name << "\n";
      return 0;
    }

    if (*validate) {
      if (validate_config.empty() && validate_preset.empty())
        throw std::invalid_argument("validate needs --config and/or --preset");
      SystemConfig cfg;
      if (!validate_preset.empty()) cfg = find_preset(validate_preset).config;
      if (!validate_config.empty()) cfg = load_config(validate_config, cfg);
      cfg.validate();
      std::cout << serialize_config(cfg);
      return 0;
    }

    ExperimentPreset preset = find_preset(preset_name);
    SystemConfig cfg = preset.config;
    if (!config_path.empty()) cfg = load_config(config_path, cfg);
    if (trials) cfg.solver.trials = *trials;
    if (seed) cfg.rng_seed = *seed;
    cfg.validate();

    const auto start = std::chrono::steady_clock::now();
    if (preset.kind == PresetKind::LearningCurve) {
      if (!schemes_csv.empty()) preset.scheme = parse_scheme_list(schemes_csv).front();
      const LearningCurve curve = run_learning_curve(cfg, preset.scheme, preset.snr_db, progress_printer(preset.name));
      emit_learning_curve(curve, out_path, cfg, &preset);
    } else {
      if (!schemes_csv.empty()) preset.sweep.schemes = parse_scheme_list(schemes_csv);
      const SweepResult result = run_sweep(cfg, preset.sweep, progress_printer(preset.name));
      emit_results(result.rows, out_path, cfg, &preset);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "wrote " << out_path << " and " << sidecar_path(out_path).string() << " in " << secs
              << " s\n";
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
