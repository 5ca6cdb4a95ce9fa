#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "cfmimo/types.hpp"

namespace cfmimo {

/// Quadratic coefficients of the closed-form SINR
///   SINR_k = rho eta_k psi_k / (sigma^2 + rho sum_{i!=k} eta_i phi_ki + rho sum_i eta_i gamma_ki).
struct SinrCoefficients {
  VectorXr psi;    // K
  MatrixXr phi;    // K x K, diagonal unused
  MatrixXr gamma;  // K x K
  double rho_f = 1.0;
  double noise_var = 1.0;

  [[nodiscard]] Eigen::Index users() const { return psi.size(); }
};

enum class AllocationScheme { Optimal, Adaptive, Uniform };

std::string_view to_string(AllocationScheme scheme);

struct AllocationResult {
  VectorXr eta;
  double achieved_t = 0.0;  // OPA: last feasible bisection target
  double t_upper = 0.0;     // OPA: final upper end of the bracket
  int iterations = 0;
  bool feasible = true;
  bool bracket_widened = false;
  AllocationScheme scheme = AllocationScheme::Uniform;
  std::vector<double> cost_trace;  // APA: cost before the first and after every update

  /// diag(N) = sqrt(eta)
  [[nodiscard]] VectorXr n_diag() const { return eta.cwiseSqrt(); }
};

/// Largest per-antenna load max_m sum_i eta_i delta_{m,i}.
double max_antenna_load(const MatrixXr& delta, const VectorXr& eta);

/// Equal eta for all users such that the busiest antenna runs at full power.
AllocationResult upa(const MatrixXr& delta);

struct Feasibility {
  bool feasible = false;
  VectorXr eta;  // componentwise-minimal eta reaching SINR_k = t for all k
};

/// Is there eta >= 0 with SINR_k(eta) >= t for all k and every antenna load
/// at most one? Solves the SINR equalities (D - tB) eta = t sigma^2/rho 1;
/// a nonnegative solution is the minimal feasible point, so only it needs
/// checking against the antenna loads.
Feasibility sinr_feasible(double t, const SinrCoefficients& coeffs, const MatrixXr& delta);

/// 2 * max_k rho psi_k / (sigma^2 max_m delta_{m,k}); an interference-free bound on t*.
double opa_upper_bound(const SinrCoefficients& coeffs, const MatrixXr& delta);

struct OpaSettings {
  double t_lo = 0.0;
  std::optional<double> t_hi;
  int iterations = 30;
  double tol = 1e-6;
  // Rescale the final eta so the busiest antenna transmits at full power.
  // Every SINR grows under the rescaling, so min_k SINR_k stays >= t_lo.
  bool fill_power = true;
};

/// Max-min SINR allocation by bisection on the epigraph target t.
AllocationResult opa_bisection(const SinrCoefficients& coeffs, const MatrixXr& delta,
                               const OpaSettings& settings = {});

/// MSE cost C(N) = E||s - f^-1 y||^2 of a fixed precoder as a function of
/// the (generally complex) K x K power matrix N, and its gradient w.r.t. N*.
struct MseCost {
  MatrixXc P;
  MatrixXc G_hat;
  double f = 1.0;
  double rho_f = 1.0;
  double noise_var = 1.0;
  double symbol_power = 1.0;

  [[nodiscard]] double operator()(const MatrixXc& N) const;
  [[nodiscard]] MatrixXc gradient(const MatrixXc& N) const;
};

struct ApaSettings {
  double step = 0.25;
  int iterations = 5;
  double initial_eta = 1e-3;
  double divergence_limit = 1e6;
};

/// Stochastic-gradient power allocation. Each iteration takes one gradient
/// step on diag(N), keeps the real diagonal, squares it into eta and scales
/// eta down uniformly until every antenna load is at most one.
AllocationResult apa_sgd(const MseCost& cost, const MatrixXr& delta, const ApaSettings& settings = {});

}  // namespace cfmimo
