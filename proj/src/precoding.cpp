#include "cfmimo/precoding.hpp"

#include <cmath>

namespace cfmimo {

std::string_view to_string(PrecoderScheme scheme) {
  switch (scheme) {
    case PrecoderScheme::MmseIterative: return "MMSE";
    case PrecoderScheme::MmseConventional: return "MMSE-CONV";
    case PrecoderScheme::ZeroForcing: return "ZF";
    case PrecoderScheme::ConjugateBeamforming: return "CB";
  }
  return "?";
}

MatrixXc ridge_inverse(const MatrixXc& G_hat, double eps, RidgeSolve mode) {
  if (!(eps > 0.0)) throw ParameterError("ridge_inverse: regularizer must be positive");
  const Eigen::Index M = G_hat.rows();
  const Eigen::Index K = G_hat.cols();
  if (mode == RidgeSolve::Auto) mode = M > K ? RidgeSolve::Gram : RidgeSolve::Primal;

  const MatrixXc G_conj = G_hat.conjugate();
  if (mode == RidgeSolve::Primal) {
    MatrixXc A = G_conj * G_hat.transpose();
    A.diagonal().array() += eps;
    Eigen::LLT<MatrixXc> llt(A);
    if (llt.info() != Eigen::Success) throw SingularityError("ridge_inverse: factorization failed");
    return llt.solve(G_conj);
  }
  MatrixXc gram = G_hat.transpose() * G_conj;
  gram.diagonal().array() += eps;
  Eigen::LLT<MatrixXc> llt(gram);
  if (llt.info() != Eigen::Success) throw SingularityError("ridge_inverse: factorization failed");
  // (A + eps I_M)^-1 Gh* = Gh* (Gh^T Gh* + eps I_K)^-1
  const MatrixXc X = llt.solve(MatrixXc::Identity(K, K));
  return G_conj * X;
}

namespace {

void check_params(const MmseParams& p) {
  if (!(p.E_tr > 0.0)) throw ParameterError("mmse_precoder: E_tr must be positive");
  if (!(p.rho_f > 0.0)) throw ParameterError("mmse_precoder: rho_f must be positive");
  if (!(p.noise_var > 0.0)) throw ParameterError("mmse_precoder: noise variance must be positive");
  if (!(p.symbol_power > 0.0)) throw ParameterError("mmse_precoder: symbol power must be positive");
}

void check_allocation(const VectorXr& n_diag, Eigen::Index K) {
  if (n_diag.size() != K) throw ParameterError("mmse_precoder: N must be K x K");
  for (Eigen::Index k = 0; k < K; ++k)
    if (!(n_diag(k) > 0.0)) throw ParameterError("mmse_precoder: N must be strictly positive");
}

}  // namespace

PrecoderOutput reform_mmse(const PrecoderOutput& base, const VectorXr& n_diag, double rho_f) {
  check_allocation(n_diag, base.P_aux.cols());
  PrecoderOutput out = base;
  out.P = (base.f / std::sqrt(rho_f)) * base.P_aux * n_diag.cwiseInverse().cast<Complex>().asDiagonal();
  out.delta = compute_delta(out.P);
  return out;
}

PrecoderOutput mmse_precoder(const MatrixXc& G_hat, const VectorXr& n_diag, const MmseParams& params) {
  check_params(params);
  const Eigen::Index K = G_hat.cols();
  check_allocation(n_diag, K);

  PrecoderOutput out;
  out.scheme = PrecoderScheme::MmseIterative;
  out.regularizer = static_cast<double>(K) * params.noise_var / params.E_tr;
  out.P_aux = ridge_inverse(G_hat, out.regularizer, params.solve);
  // tr(Pt C_s Pt^H) with C_s = sigma_s^2 I
  const double power = params.symbol_power * out.P_aux.squaredNorm();
  if (!(power > 0.0)) throw SingularityError("mmse_precoder: channel estimate is identically zero");
  out.f = std::sqrt(params.E_tr / power);
  return reform_mmse(out, n_diag, params.rho_f);
}

PrecoderOutput conventional_mmse_precoder(const MatrixXc& G_hat, const MmseParams& params) {
  PrecoderOutput out = mmse_precoder(G_hat, VectorXr::Ones(G_hat.cols()), params);
  out.scheme = PrecoderScheme::MmseConventional;
  return out;
}

PrecoderOutput zf_precoder(const MatrixXc& G_hat) {
  const Eigen::Index K = G_hat.cols();
  const MatrixXc G_conj = G_hat.conjugate();
  const VectorXr norms = G_hat.colwise().norm().transpose();
  if (!(norms.minCoeff() > 0.0))
    throw SingularityError("zf_precoder: a user has an all-zero channel estimate");
  // Factor the unit-diagonal Gram so the pivot test measures conditioning
  // rather than path-loss spread between users.
  const VectorXc scale = norms.cwiseInverse().cast<Complex>();
  const MatrixXc gram = scale.asDiagonal() * (G_hat.transpose() * G_conj) * scale.asDiagonal();
  Eigen::LLT<MatrixXc> llt(gram);
  const double pivot = llt.matrixLLT().diagonal().cwiseAbs().minCoeff();
  if (llt.info() != Eigen::Success || pivot * pivot < 1e-12)
    throw SingularityError("zf_precoder: Gh^T Gh* is singular (rank-deficient channel)");

  PrecoderOutput out;
  out.scheme = PrecoderScheme::ZeroForcing;
  out.P = G_conj * scale.asDiagonal() * llt.solve(MatrixXc::Identity(K, K)) * scale.asDiagonal();
  out.f = 1.0;
  out.delta = compute_delta(out.P);
  return out;
}

PrecoderOutput cb_precoder(const MatrixXc& G_hat) {
  PrecoderOutput out;
  out.scheme = PrecoderScheme::ConjugateBeamforming;
  out.P = G_hat.conjugate();
  out.f = 1.0;
  out.delta = compute_delta(out.P);
  return out;
}

}  // namespace cfmimo
