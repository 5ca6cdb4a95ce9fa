#pragma once

#include <string_view>

#include "cfmimo/types.hpp"

namespace cfmimo {

enum class PrecoderScheme { MmseIterative, MmseConventional, ZeroForcing, ConjugateBeamforming };

std::string_view to_string(PrecoderScheme scheme);

struct PrecoderOutput {
  MatrixXc P;       // M x K
  double f = 1.0;   // transmit normalization (receiver AGC)
  PrecoderScheme scheme = PrecoderScheme::MmseIterative;
  MatrixXr delta;   // |P|^2 elementwise
  // MMSE only: the N-independent part (Pt) and its regularizer.
  MatrixXc P_aux;
  double regularizer = 0.0;
};

/// Per-antenna per-user power loadings |P_{m,i}|^2.
template <class Derived>
MatrixXr compute_delta(const Eigen::MatrixBase<Derived>& P) {
  return P.cwiseAbs2();
}

/// How the ridge system (Gh* Gh^T + eps I_M)^-1 Gh* is solved.
enum class RidgeSolve {
  Auto,    // Gram form whenever M > K
  Primal,  // M x M Cholesky
  Gram,    // Gh* (Gh^T Gh* + eps I_K)^-1, K x K Cholesky
};

/// Regularized channel inverse Pt = (Gh* Gh^T + eps I_M)^-1 Gh*.
MatrixXc ridge_inverse(const MatrixXc& G_hat, double eps, RidgeSolve mode = RidgeSolve::Auto);

struct MmseParams {
  double E_tr = 1.0;
  double rho_f = 1.0;
  double noise_var = 1.0;     // sigma_w^2, tr(C_w) = K sigma_w^2
  double symbol_power = 1.0;  // C_s = sigma_s^2 I_K
  RidgeSolve solve = RidgeSolve::Auto;
};

/// MMSE precoder that carries the power-allocation matrix:
///   P = (f / sqrt(rho_f)) Pt N^-1,   f = sqrt(E_tr / tr(Pt C_s Pt^H)),
/// with regularizer eps = K sigma_w^2 / E_tr. `n_diag` holds diag(N) = sqrt(eta).
PrecoderOutput mmse_precoder(const MatrixXc& G_hat, const VectorXr& n_diag, const MmseParams& params);

/// The same precoder with N = I and no later re-formation.
PrecoderOutput conventional_mmse_precoder(const MatrixXc& G_hat, const MmseParams& params);

/// Re-forms an MMSE output for a new N without recomputing Pt and f.
PrecoderOutput reform_mmse(const PrecoderOutput& base, const VectorXr& n_diag, double rho_f);

/// P = Gh* (Gh^T Gh*)^-1, f = 1. Throws SingularityError on rank deficiency.
PrecoderOutput zf_precoder(const MatrixXc& G_hat);

/// P = Gh*, f = 1.
PrecoderOutput cb_precoder(const MatrixXc& G_hat);

}  // namespace cfmimo
