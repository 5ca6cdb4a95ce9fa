#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "cfmimo/topology_channel.hpp"

using namespace cfmimo;

TEST_CASE("path loss constant and branches") {
  SystemConfig cfg;
  CHECK(path_loss_constant_db(cfg) == doctest::Approx(140.7151).epsilon(1e-6));
  const double L = path_loss_constant_db(cfg);
  CHECK(path_loss_db(cfg.d0, cfg) == path_loss_db(cfg.d0 / 2, cfg));
  CHECK(path_loss_db(100.0, cfg) == doctest::Approx(-(L + 70.0)).epsilon(1e-12));
  CHECK(path_loss_db(30.0, cfg) == doctest::Approx(-L - 15.0 * std::log10(50.0) - 20.0 * std::log10(30.0)));
  CHECK(path_loss_db(0.0, cfg) == path_loss_db(cfg.d0, cfg));
}

TEST_CASE("mean AP-user distance matches an independent Monte-Carlo") {
  SystemConfig cfg;
  cfg.num_aps = 128;
  cfg.num_users = 16;
  double sum = 0.0, sum2 = 0.0;
  long n = 0;
  for (std::uint64_t trial = 0; trial < 40; ++trial) {
    const ChannelRealization r = make_realization(cfg, trial);
    for (Eigen::Index i = 0; i < r.distance.size(); ++i) {
      sum += r.distance(i);
      sum2 += r.distance(i) * r.distance(i);
      ++n;
    }
  }
  const double mean = sum / n;

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.0, cfg.area_side);
  double ref = 0.0;
  const long m = 2000000;
  for (long i = 0; i < m; ++i) ref += std::hypot(u(rng) - u(rng), u(rng) - u(rng));
  ref /= m;

  // positions are shared within a trial, so use a conservative spread
  const double sd = std::sqrt(sum2 / n - mean * mean);
  CHECK(std::abs(mean - ref) < 3.0 * sd / std::sqrt(40.0 * 16.0));
  CHECK(ref == doctest::Approx(521.4).epsilon(0.005));
}

TEST_CASE("large-scale coefficients") {
  SystemConfig cfg;
  cfg.antennas_per_ap = 1;

  SUBCASE("no shadowing inside d1") {
    MatrixXr d(3, 2);
    d << 5, 20, 40, 50, 12, 1;
    Rng a = make_stream(1, 0, Stream::Shadowing);
    Rng b = make_stream(2, 9, Stream::Shadowing);
    const MatrixXr b1 = large_scale_coeffs(d, cfg, a);
    const MatrixXr b2 = large_scale_coeffs(d, cfg, b);
    CHECK(b1 == b2);
    for (Eigen::Index i = 0; i < d.size(); ++i)
      CHECK(b1(i) == doctest::Approx(std::pow(10.0, path_loss_db(d(i), cfg) / 10.0)).epsilon(1e-14));
  }
  SUBCASE("zero sigma is deterministic") {
    cfg.shadow_sigma_db = 0.0;
    MatrixXr d = MatrixXr::Constant(4, 3, 300.0);
    Rng a = make_stream(1, 0, Stream::Shadowing);
    Rng b = make_stream(5, 1, Stream::Shadowing);
    CHECK(large_scale_coeffs(d, cfg, a) == large_scale_coeffs(d, cfg, b));
  }
  SUBCASE("shadowing spread at 200 m") {
    MatrixXr d = MatrixXr::Constant(1, 10000, 200.0);
    Rng rng = make_stream(3, 0, Stream::Shadowing);
    const MatrixXr beta = large_scale_coeffs(d, cfg, rng);
    const VectorXr db = beta.row(0).transpose().unaryExpr([](double x) { return 10.0 * std::log10(x); });
    const double mean = db.mean();
    const double sd = std::sqrt((db.array() - mean).square().sum() / (db.size() - 1));
    CHECK(sd == doctest::Approx(8.0).epsilon(0.3 / 8.0));
    CHECK(mean == doctest::Approx(path_loss_db(200.0, cfg)).epsilon(0.01));
  }
}

TEST_CASE("row blocks are constant per AP") {
  SystemConfig cfg;
  cfg.num_aps = 6;
  cfg.antennas_per_ap = 4;
  cfg.num_users = 3;
  cfg.selected_aps = 2;
  const ChannelRealization r = make_realization(cfg, 2);
  CHECK(r.beta.rows() == 24);
  for (int l = 0; l < 6; ++l)
    for (int k = 0; k < 3; ++k)
      for (int j = 1; j < 4; ++j) {
        CHECK(r.beta(l * 4 + j, k) == r.beta(l * 4, k));
        CHECK(r.alpha(l * 4 + j, k) == r.alpha(l * 4, k));
        CHECK(r.distance(l * 4 + j, k) == r.distance(l * 4, k));
      }
}

TEST_CASE("realize_channel variances") {
  Rng rng = make_stream(4, 0, Stream::Fading);
  SUBCASE("n = 0.99, beta = 2") {
    const MatrixXr beta = MatrixXr::Constant(1, 10000, 2.0);
    const ChannelDraw d = realize_channel(beta, 0.99, rng);
    CHECK(d.G_hat.cwiseAbs2().mean() == doctest::Approx(1.98).epsilon(0.05));
    CHECK(d.G_tilde.cwiseAbs2().mean() == doctest::Approx(0.02).epsilon(0.05));
    CHECK((d.G - d.G_hat - d.G_tilde).norm() <= 1e-14 * d.G.norm());
    CHECK((d.alpha.array() == 1.98).all());
  }
  SUBCASE("perfect CSI") {
    const MatrixXr beta = MatrixXr::Constant(5, 3, 1e-9);
    const ChannelDraw d = realize_channel(beta, 1.0, rng);
    CHECK(d.G_tilde.norm() == 0.0);
    CHECK(d.G == d.G_hat);
  }
  SUBCASE("no information") {
    const MatrixXr beta = MatrixXr::Constant(5, 3, 1.0);
    const ChannelDraw d = realize_channel(beta, 0.0, rng);
    CHECK(d.G_hat.norm() == 0.0);
  }
  CHECK_THROWS_AS(realize_channel(MatrixXr::Ones(1, 1), 1.2, rng), ParameterError);
}

TEST_CASE("realizations are reproducible") {
  SystemConfig cfg;
  cfg.num_aps = 10;
  cfg.num_users = 3;
  cfg.selected_aps = 5;
  const ChannelRealization a = make_realization(cfg, 5);
  const ChannelRealization b = make_realization(cfg, 5);
  CHECK(a.G == b.G);
  CHECK(a.G_hat == b.G_hat);
  CHECK(a.beta == b.beta);
  CHECK(a.ap_positions == b.ap_positions);
  const ChannelRealization c = make_realization(cfg, 6);
  CHECK(a.G != c.G);
}

namespace {

MatrixXc dft_pilots(int tau, int K) {
  MatrixXc P(tau, K);
  for (int t = 0; t < tau; ++t)
    for (int k = 0; k < K; ++k)
      P(t, k) = std::polar(1.0 / std::sqrt(double(tau)), 2.0 * M_PI * t * k / tau);
  return P;
}

}  // namespace

TEST_CASE("pilot-based MMSE estimate") {
  Rng rng = make_stream(9, 0, Stream::Pilots);
  const int K = 2, tau = 4, M = 5000;

  SUBCASE("rho tau = 1, beta = 1 gives variance 1/2") {
    const double rho_r = 1.0 / tau;
    const MatrixXr beta = MatrixXr::Ones(M, K);
    const MatrixXc G = complex_normal_matrix(M, K, rng);
    const MatrixXc G_hat = mmse_pilot_estimate(G, beta, dft_pilots(tau, K), rho_r, rng);
    CHECK(pilot_estimate_variance(1.0, rho_r, tau) == doctest::Approx(0.5));
    CHECK(G_hat.cwiseAbs2().mean() == doctest::Approx(0.5).epsilon(0.05));
    // error is uncorrelated with the estimate
    const Complex corr = (G - G_hat).cwiseProduct(G_hat.conjugate()).mean();
    CHECK(std::abs(corr) < 0.02);
  }
  SUBCASE("matches the n-parameterized path") {
    const double rho_r = 3.0, b = 0.5;
    const double n = rho_r * tau * b / (1.0 + rho_r * tau * b);
    CHECK(pilot_estimate_variance(b, rho_r, tau) == doctest::Approx(n * b).epsilon(1e-14));
    const MatrixXr beta = MatrixXr::Constant(M, K, b);
    const MatrixXc G = std::sqrt(b) * complex_normal_matrix(M, K, rng);
    const MatrixXc G_hat = mmse_pilot_estimate(G, beta, dft_pilots(tau, K), rho_r, rng);
    CHECK(G_hat.cwiseAbs2().mean() == doctest::Approx(n * b).epsilon(0.05));
    CHECK((G - G_hat).cwiseAbs2().mean() == doctest::Approx((1 - n) * b).epsilon(0.05));
  }
  SUBCASE("high training SNR") {
    const double rho_r = 1e8;
    CHECK(pilot_estimate_variance(1.0, rho_r, tau) == doctest::Approx(1.0).epsilon(1e-7));
    const MatrixXr beta = MatrixXr::Ones(50, K);
    const MatrixXc G = complex_normal_matrix(50, K, rng);
    const MatrixXc G_hat = mmse_pilot_estimate(G, beta, dft_pilots(tau, K), rho_r, rng);
    CHECK((G - G_hat).cwiseAbs2().mean() < 1e-6);
  }
  SUBCASE("zero beta gives a zero estimate") {
    const MatrixXr beta = MatrixXr::Zero(10, K);
    const MatrixXc G = MatrixXc::Zero(10, K);
    CHECK(mmse_pilot_estimate(G, beta, dft_pilots(tau, K), 1.0, rng).norm() == 0.0);
  }
  SUBCASE("rejects contaminated or short pilots") {
    const MatrixXr beta = MatrixXr::Ones(3, K);
    const MatrixXc G = MatrixXc::Ones(3, K);
    MatrixXc bad = dft_pilots(tau, K);
    bad.col(1) = bad.col(0);
    CHECK_THROWS_AS(mmse_pilot_estimate(G, beta, bad, 1.0, rng), ParameterError);
    CHECK_THROWS_AS(mmse_pilot_estimate(G, beta, dft_pilots(1, K).topRows(1), 1.0, rng), ParameterError);
  }
}
