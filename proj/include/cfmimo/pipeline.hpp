#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfmimo/aps.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/metrics.hpp"
#include "cfmimo/power_allocation.hpp"
#include "cfmimo/precoding.hpp"
#include "cfmimo/topology_channel.hpp"

namespace cfmimo {

enum class Selection { None, LargeScale, Exhaustive };

std::string_view to_string(Selection selection);

/// Precoder + power allocation + AP selection, written e.g. "MMSE+OPA+LS".
struct Scheme {
  PrecoderScheme precoder = PrecoderScheme::MmseIterative;
  AllocationScheme allocation = AllocationScheme::Optimal;
  Selection selection = Selection::None;

  [[nodiscard]] std::string name() const;
  /// Accepts "PRECODER+ALLOCATION[+SELECTION]", case-insensitive; the
  /// selection defaults to NS. Throws std::invalid_argument listing the
  /// valid names.
  static Scheme parse(std::string_view text);
  /// Throws std::invalid_argument for combinations the pipeline does not run.
  void check_supported() const;

  bool operator==(const Scheme&) const = default;
};

/// Human-readable list of accepted scheme tokens.
std::string valid_scheme_names();

/// Per-trial power scaling: rho_f from the SNR and the (unselected) channel
/// estimate, E_tr = factor * M * rho_f.
struct LinkBudget {
  double rho_f = 1.0;
  double E_tr = 1.0;
  double noise_var = 1.0;
  double symbol_power = 1.0;
};

LinkBudget make_budget(const SystemConfig& cfg, const ChannelRealization& r, double snr_db);

struct StageTrace {
  int precoder_formations = 0;
  int allocation_solves = 0;
  std::vector<int> solver_iterations;
  double precoding_seconds = 0.0;
  double allocation_seconds = 0.0;
  long long es_candidates = 0;
};

struct PipelineResult {
  SelectionMask mask;
  PrecoderOutput precoder;  // final
  AllocationResult first;
  AllocationResult final;
  SinrCoefficients coeffs;  // against the final precoder
  LinkMetrics metrics;
  StageTrace trace;
};

/// Runs precode (N = I) -> allocate -> re-precode with N_first -> allocate
/// on a fixed selection mask. The scheme's selection field is ignored.
PipelineResult evaluate_with_mask(const ChannelRealization& r, const SelectionMask& mask,
                                  const Scheme& scheme, const LinkBudget& budget,
                                  const SolverSettings& solver);

/// Selection (per scheme) followed by evaluate_with_mask.
PipelineResult run_scheme(const ChannelRealization& r, const SystemConfig& cfg, const Scheme& scheme,
                          const LinkBudget& budget);

/// Draws trial `trial` of cfg and runs `scheme` at `snr_db`.
PipelineResult run_trial(const SystemConfig& cfg, const Scheme& scheme, double snr_db,
                         std::uint64_t trial);

/// QPSK BER of a finished pipeline on its realization. Symbols and noise
/// come from the (seed, trial) sub-streams, so every scheme and SNR point
/// of a trial sees the same bits and the same normalized noise.
BerResult measure_ber(const PipelineResult& result, const ChannelRealization& r,
                      const LinkBudget& budget, const SystemConfig& cfg, std::uint64_t trial);

enum class SweepAxis { Snr, SelectionFraction, AntennasPerAp };

std::string_view to_string(SweepAxis axis);

struct SweepSpec {
  SweepAxis axis = SweepAxis::Snr;
  std::vector<double> values;  // ignored for Snr (the config grid is used)
  std::vector<Scheme> schemes;
  bool measure_ber = false;
};

struct SweepRow {
  std::string scheme;
  std::string axis_name;
  double axis_value = 0.0;
  double sum_rate_mean = 0.0;
  double sum_rate_se = 0.0;
  double min_sinr_db_mean = 0.0;
  double min_sinr_db_se = 0.0;
  std::optional<double> ber_mean;
  std::optional<double> ber_se;
  int trials = 0;
  std::uint64_t seed = 0;

  bool operator==(const SweepRow&) const = default;
};

struct TrialSample {
  double sum_rate = 0.0;
  double min_sinr = 0.0;
  double min_sinr_db = 0.0;
  std::optional<double> ber;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  // samples[row][trial], rows in the same order as `rows`
  std::vector<std::vector<TrialSample>> samples;
};

/// Called after each finished trial with (done, total).
using ProgressFn = std::function<void(int, int)>;

/// Runs cfg.solver.trials trials of every (axis point, scheme) pair. Trials
/// run concurrently; results are reduced in trial order, so the output is
/// independent of the thread count.
SweepResult run_sweep(const SystemConfig& cfg, const SweepSpec& spec, const ProgressFn& progress = {});

struct LearningCurve {
  std::vector<double> cost_mean;  // index 0 = before the first update
  std::vector<double> cost_se;
  std::vector<std::vector<double>> traces;  // traces[trial][iteration]
};

/// First-pass APA cost trajectory of `scheme` (must use APA), one trace per trial.
LearningCurve run_learning_curve(const SystemConfig& cfg, const Scheme& scheme, double snr_db,
                                 const ProgressFn& progress = {});

/// Mean and standard error (sample standard deviation / sqrt(n)).
std::pair<double, double> mean_and_se(const std::vector<double>& xs);

}  // namespace cfmimo
