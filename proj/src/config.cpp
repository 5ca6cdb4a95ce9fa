#include "cfmimo/config.hpp"

#include <cmath>

namespace cfmimo {

double SystemConfig::noise_variance() const {
  return noise_temp * kBoltzmann * bandwidth * std::pow(10.0, noise_figure_db / 10.0);
}

void SystemConfig::validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw ValidationError(field, what);
  };
  require(num_aps > 0, "num_aps", "must be positive");
  require(antennas_per_ap > 0, "antennas_per_ap", "must be positive");
  require(num_users > 0, "num_users", "must be positive");
  require(selected_aps >= 1 && selected_aps <= num_aps, "selected_aps",
          "must lie in [1, num_aps]");
  require(total_antennas() > num_users, "num_users",
          "total antenna count num_aps*antennas_per_ap must exceed num_users");
  require(area_side >= 0.0, "area_side", "must be nonnegative");
  require(carrier_freq_mhz > 0.0, "carrier_freq_mhz", "must be positive");
  require(ap_height > 0.0, "ap_height", "must be positive");
  require(user_height >= 0.0, "user_height", "must be nonnegative");
  require(shadow_sigma_db >= 0.0, "shadow_sigma_db", "must be nonnegative");
  require(d0 > 0.0, "d0", "must be positive");
  require(d0 < d1, "d1", "must exceed d0");
  require(noise_temp > 0.0, "noise_temp", "must be positive");
  require(bandwidth > 0.0, "bandwidth", "must be positive");
  require(symbol_power > 0.0, "symbol_power", "must be positive");
  require(csi_quality >= 0.0 && csi_quality <= 1.0, "csi_quality", "must lie in [0, 1]");
  require(!snr_grid_db.empty(), "snr_grid_db", "must list at least one value");
  for (double s : snr_grid_db) require(std::isfinite(s), "snr_grid_db", "values must be finite");
  require(total_power_factor > 0.0, "total_power_factor", "must be positive");

  require(solver.opa_iterations >= 1, "opa_iterations", "must be at least 1");
  require(solver.opa_tol >= 0.0, "opa_tol", "must be nonnegative");
  require(solver.apa_step >= 0.0, "apa_step", "must be nonnegative");
  require(solver.apa_iterations >= 1, "apa_iterations", "must be at least 1");
  require(solver.symbols_per_packet >= 1, "symbols_per_packet", "must be at least 1");
  require(solver.packets >= 1, "packets", "must be at least 1");
  require(solver.es_budget >= 1.0, "es_budget", "must be at least 1");
  require(solver.trials >= 1, "trials", "must be at least 1");
  require(solver.threads >= 0, "threads", "must be nonnegative");
}

}  // namespace cfmimo
