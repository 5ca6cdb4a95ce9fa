#include "doctest.h"
#include "helpers.hpp"
#include "cfmimo/precoding.hpp"

using namespace cfmimo;
using testutil::random_complex;
using testutil::rel_err;

TEST_CASE("MMSE on the identity channel") {
  const int K = 4;
  const MmseParams p{double(K), 3.0, 1.0, 1.0};
  const PrecoderOutput out = mmse_precoder(MatrixXc::Identity(K, K), VectorXr::Ones(K), p);
  CHECK(out.regularizer == doctest::Approx(1.0));
  CHECK((out.P_aux - 0.5 * MatrixXc::Identity(K, K)).norm() < 1e-14);
  CHECK(out.f == doctest::Approx(2.0));
  CHECK((out.P - MatrixXc::Identity(K, K) / std::sqrt(3.0)).norm() < 1e-14);
  const PrecoderOutput conv = conventional_mmse_precoder(MatrixXc::Identity(K, K), p);
  CHECK((conv.P - out.P).norm() == 0.0);
  CHECK(conv.scheme == PrecoderScheme::MmseConventional);
}

TEST_CASE("MMSE power identity and N structure") {
  std::mt19937_64 rng(11);
  const MatrixXc G = random_complex(6, 3, rng);
  const MmseParams p{12.0, 0.7, 0.3, 1.0};
  const PrecoderOutput base = mmse_precoder(G, VectorXr::Ones(3), p);
  CHECK(rel_err(p.rho_f * base.P.squaredNorm() * p.symbol_power, p.E_tr) < 1e-9);

  const VectorXr n = (VectorXr(3) << 0.5, 1.3, 2.0).finished();
  const PrecoderOutput scaled = mmse_precoder(G, n, p);
  const MatrixXc expect = base.P * n.cwiseInverse().cast<Complex>().asDiagonal();
  CHECK((scaled.P - expect).norm() < 1e-12 * expect.norm());
  CHECK(scaled.f == base.f);
  CHECK((reform_mmse(base, n, p.rho_f).P - scaled.P).norm() < 1e-12 * expect.norm());
  CHECK((scaled.delta - scaled.P.cwiseAbs2()).norm() == 0.0);

  CHECK_THROWS_AS(mmse_precoder(G, VectorXr::Zero(3), p), ParameterError);
  CHECK_THROWS_AS(mmse_precoder(G, VectorXr::Ones(3), MmseParams{0.0, 1.0, 1.0, 1.0}), ParameterError);
}

TEST_CASE("ridge solve: primal and Gram forms agree") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXc G = random_complex(16, 4, rng);
    const double eps = 0.05 + 0.1 * trial;
    const MatrixXc a = ridge_inverse(G, eps, RidgeSolve::Primal);
    const MatrixXc b = ridge_inverse(G, eps, RidgeSolve::Gram);
    CHECK((a - b).norm() < 1e-8 * a.norm());
    // defining linear system
    MatrixXc A = G.conjugate() * G.transpose();
    A.diagonal().array() += eps;
    CHECK((A * b - G.conjugate()).norm() < 1e-9 * G.norm());
  }
  CHECK_THROWS_AS(ridge_inverse(MatrixXc::Identity(2, 2), 0.0), ParameterError);
}

TEST_CASE("MMSE approaches ZF as the regularizer vanishes") {
  std::mt19937_64 rng(13);
  const MatrixXc G = random_complex(8, 3, rng);
  const MatrixXc zf = zf_precoder(G).P;
  const MatrixXc zf_n = zf / zf.norm();
  double prev = 1e300;
  for (double eps : {1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
    const MatrixXc pt = ridge_inverse(G, eps);
    const double d = (pt / pt.norm() - zf_n).norm();
    CHECK(d < prev);
    prev = d;
    if (eps == 1e-6) CHECK((G.transpose() * pt / (G.transpose() * pt).trace().real() * 3.0 -
                            MatrixXc::Identity(3, 3)).norm() < 1e-4);
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("zero forcing") {
  CHECK((zf_precoder(MatrixXc::Identity(3, 3)).P - MatrixXc::Identity(3, 3)).norm() < 1e-15);
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXc G = random_complex(4 + trial, 2 + trial % 3, rng);
    const PrecoderOutput out = zf_precoder(G);
    CHECK(out.f == 1.0);
    CHECK((G.transpose() * out.P - MatrixXc::Identity(G.cols(), G.cols())).norm() < 1e-9);
  }
  SUBCASE("least-squares oracle") {
    // P is the minimum-norm solution of G^T P = I: columns lie in range(G*)
    const MatrixXc G = random_complex(4, 2, rng);
    const MatrixXc P = zf_precoder(G).P;
    const MatrixXc oracle = G.transpose().completeOrthogonalDecomposition().pseudoInverse();
    CHECK((P - oracle).norm() < 1e-10);
  }
  SUBCASE("rank deficiency") {
    MatrixXc G = random_complex(5, 3, rng);
    G.col(2) = G.col(0) * Complex(2.0, -1.0);
    CHECK_THROWS_AS(zf_precoder(G), SingularityError);
    MatrixXc Z = random_complex(5, 2, rng);
    Z.col(1).setZero();
    CHECK_THROWS_AS(zf_precoder(Z), SingularityError);
  }
}

TEST_CASE("conjugate beamforming") {
  MatrixXc g(1, 1);
  g << Complex(1, 2);
  CHECK(cb_precoder(g).P(0, 0) == Complex(1, -2));
  CHECK(cb_precoder(g).delta(0, 0) == 5.0);
  const MatrixXc real = MatrixXc::Constant(3, 2, Complex(0.5, 0.0));
  CHECK(cb_precoder(real).P == real);
  std::mt19937_64 rng(15);
  const MatrixXc G = random_complex(5, 3, rng);
  const PrecoderOutput out = cb_precoder(G);
  for (Eigen::Index i = 0; i < G.size(); ++i) CHECK(out.delta(i) == std::norm(G(i)));
}

TEST_CASE("compute_delta") {
  CHECK(compute_delta(MatrixXc::Identity(3, 3)) == MatrixXr::Identity(3, 3));
  MatrixXc P(1, 1);
  P << Complex(3, 4);
  CHECK(compute_delta(P)(0, 0) == 25.0);
}
