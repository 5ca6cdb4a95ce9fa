#pragma once

#include "cfmimo/config.hpp"
#include "cfmimo/random.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

struct Topology {
  MatrixXr ap_positions;    // L x 2
  MatrixXr user_positions;  // K x 2
};

/// One coherence block: large-scale coefficients plus true channel,
/// its estimate and the estimation error. Rows index antennas
/// (AP l owns rows l*N .. l*N+N-1), columns index users.
struct ChannelRealization {
  MatrixXr ap_positions;
  MatrixXr user_positions;
  MatrixXr distance;  // M x K
  MatrixXr beta;      // M x K, linear
  MatrixXr alpha;     // M x K, variance of the estimate
  MatrixXc G;
  MatrixXc G_hat;
  MatrixXc G_tilde;

  [[nodiscard]] Eigen::Index antennas() const { return beta.rows(); }
  [[nodiscard]] Eigen::Index users() const { return beta.cols(); }
  /// Per-entry CSI error variance beta - alpha.
  [[nodiscard]] MatrixXr error_variance() const { return beta - alpha; }
};

Topology generate_topology(const SystemConfig& cfg, Rng& rng);

/// Distances replicated over every AP's antennas (M x K).
MatrixXr antenna_distances(const Topology& topo, int antennas_per_ap);

/// Constant term of the three-slope model, in dB.
double path_loss_constant_db(const SystemConfig& cfg);

/// Three-slope path loss in dB (a negative number: the gain of the link).
double path_loss_db(double d, const SystemConfig& cfg);

/// beta = 10^(PL/10) * 10^(sigma_sh * z / 10), shadowing only beyond d1.
/// One z per AP-user pair, replicated over the AP's antennas.
MatrixXr large_scale_coeffs(const MatrixXr& distance, const SystemConfig& cfg, Rng& rng);

struct ChannelDraw {
  MatrixXc G;
  MatrixXc G_hat;
  MatrixXc G_tilde;
  MatrixXr alpha;
};

/// Draws g_hat ~ CN(0, n*beta) and g_tilde ~ CN(0, (1-n)*beta) independently.
ChannelDraw realize_channel(const MatrixXr& beta, double csi_quality, Rng& rng);

/// Full realization for trial `trial` of `cfg`, every component drawn from
/// its own (seed, trial) sub-stream.
ChannelRealization make_realization(const SystemConfig& cfg, std::uint64_t trial);

/// Uplink-training MMSE estimate from received pilots. `pilots` is tau x K
/// with orthonormal columns; rejects non-orthogonal pilot sets.
MatrixXc mmse_pilot_estimate(const MatrixXc& G, const MatrixXr& beta, const MatrixXc& pilots,
                             double rho_r, Rng& rng);

/// Estimate variance rho_r*tau*beta^2 / (1 + rho_r*tau*beta).
inline double pilot_estimate_variance(double beta, double rho_r, int tau) {
  const double snr = rho_r * tau;
  return snr * beta * beta / (1.0 + snr * beta);
}

}  // namespace cfmimo
