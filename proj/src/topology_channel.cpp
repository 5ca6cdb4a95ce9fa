#include "cfmimo/topology_channel.hpp"

#include <cmath>

namespace cfmimo {

Topology generate_topology(const SystemConfig& cfg, Rng& rng) {
  std::uniform_real_distribution<Real> coord(0.0, 1.0);
  Topology topo;
  topo.ap_positions.resize(cfg.num_aps, 2);
  topo.user_positions.resize(cfg.num_users, 2);
  for (int l = 0; l < cfg.num_aps; ++l)
    for (int c = 0; c < 2; ++c) topo.ap_positions(l, c) = cfg.area_side * coord(rng);
  for (int k = 0; k < cfg.num_users; ++k)
    for (int c = 0; c < 2; ++c) topo.user_positions(k, c) = cfg.area_side * coord(rng);
  return topo;
}

MatrixXr antenna_distances(const Topology& topo, int antennas_per_ap) {
  const Eigen::Index L = topo.ap_positions.rows();
  const Eigen::Index K = topo.user_positions.rows();
  MatrixXr d(L * antennas_per_ap, K);
  for (Eigen::Index l = 0; l < L; ++l) {
    for (Eigen::Index k = 0; k < K; ++k) {
      const Real dist = (topo.ap_positions.row(l) - topo.user_positions.row(k)).norm();
      d.block(l * antennas_per_ap, k, antennas_per_ap, 1).setConstant(dist);
    }
  }
  return d;
}

double path_loss_constant_db(const SystemConfig& cfg) {
  const double lf = std::log10(cfg.carrier_freq_mhz);
  return 46.3 + 33.9 * lf - 13.82 * std::log10(cfg.ap_height) -
         (1.1 * lf - 0.7) * cfg.user_height + (1.56 * lf - 0.8);
}

double path_loss_db(double d, const SystemConfig& cfg) {
  const double L = path_loss_constant_db(cfg);
  if (d > cfg.d1) return -L - 35.0 * std::log10(d);
  if (d > cfg.d0) return -L - 15.0 * std::log10(cfg.d1) - 20.0 * std::log10(d);
  return -L - 15.0 * std::log10(cfg.d1) - 20.0 * std::log10(cfg.d0);
}

MatrixXr large_scale_coeffs(const MatrixXr& distance, const SystemConfig& cfg, Rng& rng) {
  const int N = cfg.antennas_per_ap;
  const Eigen::Index L = distance.rows() / N;
  const Eigen::Index K = distance.cols();
  std::normal_distribution<Real> gauss(0.0, 1.0);
  MatrixXr beta(distance.rows(), K);
  // z is drawn for every pair, shadowed or not, so the stream layout does
  // not depend on the geometry.
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index l = 0; l < L; ++l) {
      const double z = gauss(rng);
      const double d = distance(l * N, k);
      double gain_db = path_loss_db(d, cfg);
      if (d > cfg.d1) gain_db += cfg.shadow_sigma_db * z;
      beta.block(l * N, k, N, 1).setConstant(std::pow(10.0, gain_db / 10.0));
    }
  }
  return beta;
}

ChannelDraw realize_channel(const MatrixXr& beta, double csi_quality, Rng& rng) {
  if (csi_quality < 0.0 || csi_quality > 1.0)
    throw ParameterError("csi_quality must lie in [0, 1]");
  ChannelDraw draw;
  draw.alpha = csi_quality * beta;
  const MatrixXc h_est = complex_normal_matrix(beta.rows(), beta.cols(), rng);
  const MatrixXc h_err = complex_normal_matrix(beta.rows(), beta.cols(), rng);
  const MatrixXr est_std = draw.alpha.cwiseSqrt();
  const MatrixXr err_std = (beta - draw.alpha).cwiseMax(0.0).cwiseSqrt();
  draw.G_hat = h_est.cwiseProduct(est_std.cast<Complex>());
  draw.G_tilde = h_err.cwiseProduct(err_std.cast<Complex>());
  draw.G = draw.G_hat + draw.G_tilde;
  return draw;
}

ChannelRealization make_realization(const SystemConfig& cfg, std::uint64_t trial) {
  Rng topo_rng = make_stream(cfg.rng_seed, trial, Stream::Topology);
  Rng shadow_rng = make_stream(cfg.rng_seed, trial, Stream::Shadowing);
  Rng fading_rng = make_stream(cfg.rng_seed, trial, Stream::Fading);

  const Topology topo = generate_topology(cfg, topo_rng);
  ChannelRealization r;
  r.ap_positions = topo.ap_positions;
  r.user_positions = topo.user_positions;
  r.distance = antenna_distances(topo, cfg.antennas_per_ap);
  r.beta = large_scale_coeffs(r.distance, cfg, shadow_rng);
  ChannelDraw draw = realize_channel(r.beta, cfg.csi_quality, fading_rng);
  r.alpha = std::move(draw.alpha);
  r.G = std::move(draw.G);
  r.G_hat = std::move(draw.G_hat);
  r.G_tilde = std::move(draw.G_tilde);
  return r;
}

MatrixXc mmse_pilot_estimate(const MatrixXc& G, const MatrixXr& beta, const MatrixXc& pilots,
                             double rho_r, Rng& rng) {
  const Eigen::Index M = G.rows();
  const Eigen::Index K = G.cols();
  const Eigen::Index tau = pilots.rows();
  if (pilots.cols() != K || beta.rows() != M || beta.cols() != K)
    throw ParameterError("mmse_pilot_estimate: dimension mismatch");
  if (tau < K) throw ParameterError("mmse_pilot_estimate: pilot length must be at least K");
  if (rho_r <= 0.0) throw ParameterError("mmse_pilot_estimate: rho_r must be positive");
  const MatrixXc gram = pilots.adjoint() * pilots;
  if ((gram - MatrixXc::Identity(K, K)).cwiseAbs().maxCoeff() > 1e-9)
    throw ParameterError("mmse_pilot_estimate: pilots must be orthonormal (contamination unsupported)");

  const double amp = std::sqrt(rho_r * static_cast<double>(tau));
  // Y row m is the tau-length training sequence received by antenna m.
  const MatrixXc noise = complex_normal_matrix(M, tau, rng);
  const MatrixXc Y = amp * G * pilots.transpose() + noise;
  // Pi_k^H y_m for all (m, k).
  const MatrixXc projected = Y * pilots.conjugate();
  MatrixXc G_hat(M, K);
  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index m = 0; m < M; ++m) {
      const double b = beta(m, k);
      G_hat(m, k) = (amp * b / (1.0 + amp * amp * b)) * projected(m, k);
    }
  return G_hat;
}

}  // namespace cfmimo
