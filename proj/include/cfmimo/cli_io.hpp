#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/pipeline.hpp"

namespace cfmimo {

struct ParseError : std::runtime_error {
  ParseError(int line_number, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_number) + ": " + what), line(line_number) {}
  int line;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Config files are flat `key = value` lines; `#` starts a comment and
/// snr_grid_db takes a comma-separated list. Keys not present keep the
/// value of `base`. The result is validated.
SystemConfig parse_config(std::string_view text, const SystemConfig& base = {});
SystemConfig load_config(const std::filesystem::path& path, const SystemConfig& base = {});

/// Every key, one per line, in a form parse_config reads back exactly.
std::string serialize_config(const SystemConfig& cfg);

/// Names accepted by parse_config.
std::vector<std::string> config_keys();

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);

enum class PresetKind { Sweep, LearningCurve };

struct ExperimentPreset {
  std::string name;
  std::string description;
  SystemConfig config;
  PresetKind kind = PresetKind::Sweep;
  SweepSpec sweep;
  // LearningCurve presets: the scheme and the single SNR point
  Scheme scheme;
  double snr_db = 0.0;
};

const std::vector<ExperimentPreset>& presets();
/// Throws std::invalid_argument listing the known names.
const ExperimentPreset& find_preset(std::string_view name);
std::string preset_names();

inline constexpr std::string_view kResultsHeader =
    "scheme,axis_name,axis_value,sum_rate_mean,sum_rate_se,min_sinr_db_mean,min_sinr_db_se,"
    "ber_mean,ber_se,trials,seed";

inline constexpr std::string_view kLearningHeader = "iteration,cost_mean,cost_se,trials,seed";

void write_results_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_results_csv(std::istream& is);

void write_learning_csv(std::ostream& os, const LearningCurve& curve, int trials, std::uint64_t seed);

/// Sidecar written next to every output: `<stem>.config.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& out);
std::string config_json(const SystemConfig& cfg, const ExperimentPreset* preset);

/// Writes the CSV and its JSON sidecar. Throws IoError if either cannot be written.
void emit_results(const std::vector<SweepRow>& rows, const std::filesystem::path& out,
                  const SystemConfig& cfg, const ExperimentPreset* preset = nullptr);
void emit_learning_curve(const LearningCurve& curve, const std::filesystem::path& out,
                         const SystemConfig& cfg, const ExperimentPreset* preset = nullptr);

}  // namespace cfmimo
