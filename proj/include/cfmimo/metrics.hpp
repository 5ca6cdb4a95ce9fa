#pragma once

#include <optional>

#include "cfmimo/power_allocation.hpp"
#include "cfmimo/random.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

struct LinkMetrics {
  VectorXr per_user_sinr;
  VectorXr per_user_rate;  // bits/s/Hz
  double sum_rate = 0.0;
  double min_sinr = 0.0;
  std::optional<double> ber;
};

/// psi_k = |gh_k^T p_k|^2, phi_ki = |gh_k^T p_i|^2,
/// gamma_ki = sum_m err_var(m,k) |P(m,i)|^2 where err_var = (1-n) beta'.
SinrCoefficients sinr_coefficients(const MatrixXc& P, const MatrixXc& G_hat,
                                   const MatrixXr& error_variance, double rho_f, double noise_var);

/// Closed-form per-user SINR for a power vector eta.
VectorXr analytic_sinr(const SinrCoefficients& coeffs, const VectorXr& eta);

/// SINR of an effective precoder (power already folded into its columns).
VectorXr effective_sinr(const MatrixXc& P_eff, const MatrixXc& G_hat, const MatrixXr& error_variance,
                        double rho_f, double noise_var);

LinkMetrics rates(const VectorXr& per_user_sinr);

/// rho_f = SNR K sigma_w^2 / tr(Gh Gh^H).
double snr_to_rho_f(double snr_linear, const MatrixXc& G_hat, double noise_var);
double rho_f_to_snr(double rho_f, const MatrixXc& G_hat, double noise_var);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Sample means of |A1|^2, |A2,i|^2 and |A3|^2 at every user, estimated by
/// drawing symbols s ~ CN(0, sigma_s^2) and CSI errors g~'_k ~ CN(0, err_var).
struct LinkPowerEstimate {
  VectorXr desired;       // E|A1|^2, per user k
  MatrixXr interference;  // E|A2,i|^2 at user k, entry (k, i)
  VectorXr csi_error;     // E|A3|^2, per user k
  int draws = 0;

  /// desired / (sigma^2 + sum_{i!=k} interference + csi_error)
  [[nodiscard]] VectorXr sinr(double noise_var) const;
};

LinkPowerEstimate empirical_link_powers(const MatrixXc& P, const VectorXr& eta, const MatrixXc& G_hat,
                                        const MatrixXr& error_variance, double rho_f,
                                        double symbol_power, int draws, Rng& rng);

struct BerResult {
  long long bit_errors = 0;
  long long bits = 0;
  bool faded_user = false;  // some |a_k| < 1e-12, counted at BER 1/2
  [[nodiscard]] double ber() const { return bits ? static_cast<double>(bit_errors) / bits : 0.0; }
};

struct BerLink {
  const MatrixXc& P;
  const VectorXr& eta;
  const MatrixXc& G;      // channel the symbols travel through (M x K)
  const MatrixXc& G_hat;  // estimate the receiver uses for its gain
  double rho_f;
  double noise_var;
};

/// Gray-mapped QPSK over y = sqrt(rho) G^T P N s + w. User k divides by
/// a_k = sqrt(rho) gh_k^T p_k sqrt(eta_k) and slices to the nearest point.
BerResult ber_qpsk(const BerLink& link, int symbols_per_packet, int packets, Rng& symbol_rng,
                   Rng& noise_rng);

}  // namespace cfmimo
