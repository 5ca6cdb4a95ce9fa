#include "cfmimo/metrics.hpp"

#include <cmath>

namespace cfmimo {

SinrCoefficients sinr_coefficients(const MatrixXc& P, const MatrixXc& G_hat,
                                   const MatrixXr& error_variance, double rho_f, double noise_var) {
  if (P.rows() != G_hat.rows() || P.cols() != G_hat.cols() || error_variance.rows() != P.rows() ||
      error_variance.cols() != P.cols())
    throw ParameterError("sinr_coefficients: dimension mismatch");
  const MatrixXr gain = (G_hat.transpose() * P).cwiseAbs2();
  SinrCoefficients c;
  c.psi = gain.diagonal();
  c.phi = gain;
  c.gamma = error_variance.transpose() * P.cwiseAbs2();
  c.rho_f = rho_f;
  c.noise_var = noise_var;
  return c;
}

VectorXr analytic_sinr(const SinrCoefficients& c, const VectorXr& eta) {
  const Eigen::Index K = c.users();
  VectorXr sinr(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    double interference = 0.0;
    for (Eigen::Index i = 0; i < K; ++i)
      if (i != k) interference += eta(i) * c.phi(k, i);
    const double csi = c.gamma.row(k).dot(eta);
    sinr(k) = c.rho_f * eta(k) * c.psi(k) / (c.noise_var + c.rho_f * (interference + csi));
  }
  return sinr;
}

VectorXr effective_sinr(const MatrixXc& P_eff, const MatrixXc& G_hat, const MatrixXr& error_variance,
                        double rho_f, double noise_var) {
  const MatrixXc H = G_hat.transpose() * P_eff;
  const MatrixXr csi = error_variance.transpose() * P_eff.cwiseAbs2();
  const Eigen::Index K = H.rows();
  VectorXr sinr(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double desired = rho_f * std::norm(H(k, k));
    const double interference = rho_f * (H.row(k).cwiseAbs2().sum() - std::norm(H(k, k)));
    sinr(k) = desired / (noise_var + interference + rho_f * csi.row(k).sum());
  }
  return sinr;
}

LinkMetrics rates(const VectorXr& per_user_sinr) {
  LinkMetrics m;
  m.per_user_sinr = per_user_sinr;
  m.per_user_rate = per_user_sinr.unaryExpr([](double s) { return std::log2(1.0 + s); });
  m.sum_rate = m.per_user_rate.sum();
  m.min_sinr = per_user_sinr.size() ? per_user_sinr.minCoeff() : 0.0;
  return m;
}

double snr_to_rho_f(double snr_linear, const MatrixXc& G_hat, double noise_var) {
  const double power = G_hat.squaredNorm();
  if (!(power > 0.0)) throw ParameterError("snr_to_rho_f: channel estimate is identically zero");
  return snr_linear * static_cast<double>(G_hat.cols()) * noise_var / power;
}

double rho_f_to_snr(double rho_f, const MatrixXc& G_hat, double noise_var) {
  return rho_f * G_hat.squaredNorm() / (static_cast<double>(G_hat.cols()) * noise_var);
}

VectorXr LinkPowerEstimate::sinr(double noise_var) const {
  VectorXr out(desired.size());
  for (Eigen::Index k = 0; k < desired.size(); ++k) {
    const double others = interference.row(k).sum() - interference(k, k);
    out(k) = desired(k) / (noise_var + others + csi_error(k));
  }
  return out;
}

LinkPowerEstimate empirical_link_powers(const MatrixXc& P, const VectorXr& eta, const MatrixXc& G_hat,
                                        const MatrixXr& error_variance, double rho_f,
                                        double symbol_power, int draws, Rng& rng) {
  const Eigen::Index M = P.rows();
  const Eigen::Index K = P.cols();
  const double amp = std::sqrt(rho_f);
  const MatrixXc PN = P * eta.cwiseSqrt().cast<Complex>().asDiagonal();
  // gh_k^T p_i sqrt(eta_i): column i carries user i's stream
  const MatrixXc H = G_hat.transpose() * PN;
  const MatrixXr err_std = error_variance.cwiseMax(0.0).cwiseSqrt();
  const double s_std = std::sqrt(symbol_power);

  LinkPowerEstimate est;
  est.desired = VectorXr::Zero(K);
  est.interference = MatrixXr::Zero(K, K);
  est.csi_error = VectorXr::Zero(K);
  est.draws = draws;

  VectorXc s(K);
  VectorXc g_err(M);
  for (int d = 0; d < draws; ++d) {
    for (Eigen::Index i = 0; i < K; ++i) s(i) = s_std * complex_normal(rng);
    // One user's stream at a time: |gh_k^T p_i sqrt(eta_i) s_i|^2.
    for (Eigen::Index k = 0; k < K; ++k)
      for (Eigen::Index i = 0; i < K; ++i) est.interference(k, i) += std::norm(amp * H(k, i) * s(i));
    const VectorXc x = PN * s;
    for (Eigen::Index k = 0; k < K; ++k) {
      for (Eigen::Index m = 0; m < M; ++m) g_err(m) = err_std(m, k) * complex_normal(rng);
      est.csi_error(k) += std::norm(amp * g_err.cwiseProduct(x).sum());
    }
  }
  const double inv = 1.0 / draws;
  est.interference *= inv;
  est.csi_error *= inv;
  est.desired = est.interference.diagonal();
  return est;
}

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

Complex qpsk_symbol(int b0, int b1) {
  return {(1 - 2 * b0) * kInvSqrt2, (1 - 2 * b1) * kInvSqrt2};
}

}  // namespace

BerResult ber_qpsk(const BerLink& link, int symbols_per_packet, int packets, Rng& symbol_rng,
                   Rng& noise_rng) {
  const Eigen::Index K = link.P.cols();
  const double amp = std::sqrt(link.rho_f);
  const MatrixXc PN = link.P * link.eta.cwiseSqrt().cast<Complex>().asDiagonal();
  const MatrixXc through = amp * link.G.transpose() * PN;     // K x K true response
  const MatrixXc assumed = amp * link.G_hat.transpose() * PN;  // receiver's view
  const double noise_std = std::sqrt(link.noise_var);
  std::bernoulli_distribution coin(0.5);

  BerResult out;
  VectorXc s(K);
  Eigen::Matrix<int, Eigen::Dynamic, 2> bits(K, 2);
  for (int p = 0; p < packets; ++p) {
    for (int n = 0; n < symbols_per_packet; ++n) {
      for (Eigen::Index k = 0; k < K; ++k) {
        bits(k, 0) = coin(symbol_rng);
        bits(k, 1) = coin(symbol_rng);
        s(k) = qpsk_symbol(bits(k, 0), bits(k, 1));
      }
      const VectorXc received = through * s;
      for (Eigen::Index k = 0; k < K; ++k) {
        const Complex y = received(k) + noise_std * complex_normal(noise_rng);
        const Complex a = assumed(k, k);
        out.bits += 2;
        if (std::abs(a) < 1e-12) {
          // no usable gain: a coin flip per bit, counted at its expectation
          out.faded_user = true;
          out.bit_errors += 1;
          continue;
        }
        const Complex z = y / a;
        out.bit_errors += (z.real() < 0.0) != (bits(k, 0) == 1);
        out.bit_errors += (z.imag() < 0.0) != (bits(k, 1) == 1);
      }
    }
  }
  return out;
}

}  // namespace cfmimo
