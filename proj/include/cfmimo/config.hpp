#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfmimo {

struct ValidationError : std::invalid_argument {
  ValidationError(const std::string& field_name, const std::string& what)
      : std::invalid_argument(field_name + ": " + what), field(field_name) {}
  std::string field;
};

/// Knobs of the iterative solvers and of the Monte-Carlo harness.
struct SolverSettings {
  int opa_iterations = 30;
  double opa_tol = 1e-6;
  double apa_step = 0.25;
  int apa_iterations = 5;
  int symbols_per_packet = 100;
  int packets = 10;
  double es_budget = 1e6;
  int trials = 120;
  int threads = 0;  // 0 -> hardware concurrency

  bool operator==(const SolverSettings&) const = default;
};

/// Scenario constants. Distances in meters, frequency in MHz, gains in dB
/// unless noted otherwise.
struct SystemConfig {
  int num_aps = 128;
  int antennas_per_ap = 1;
  int num_users = 16;
  int selected_aps = 64;

  double area_side = 1000.0;
  double carrier_freq_mhz = 1900.0;
  double ap_height = 15.0;
  double user_height = 1.65;
  double shadow_sigma_db = 8.0;
  double d0 = 10.0;
  double d1 = 50.0;

  double noise_temp = 290.0;
  double bandwidth = 20e6;
  double noise_figure_db = 9.0;
  double symbol_power = 1.0;

  double csi_quality = 0.99;
  std::vector<double> snr_grid_db{0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
  // E_tr = total_power_factor * M * rho_f
  double total_power_factor = 1.0;
  std::uint64_t rng_seed = 1;

  SolverSettings solver;

  [[nodiscard]] int total_antennas() const { return num_aps * antennas_per_ap; }
  [[nodiscard]] int selected_antennas() const { return selected_aps * antennas_per_ap; }

  /// Thermal noise power T0 * k_B * B * NF in watts.
  [[nodiscard]] double noise_variance() const;

  /// Throws ValidationError naming the first offending field.
  void validate() const;

  bool operator==(const SystemConfig&) const = default;
};

inline constexpr double kBoltzmann = 1.381e-23;

}  // namespace cfmimo
