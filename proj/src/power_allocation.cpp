#include "cfmimo/power_allocation.hpp"

#include <cmath>
#include <limits>

namespace cfmimo {

std::string_view to_string(AllocationScheme scheme) {
  switch (scheme) {
    case AllocationScheme::Optimal: return "OPA";
    case AllocationScheme::Adaptive: return "APA";
    case AllocationScheme::Uniform: return "UPA";
  }
  return "?";
}

double max_antenna_load(const MatrixXr& delta, const VectorXr& eta) {
  return (delta * eta).maxCoeff();
}

AllocationResult upa(const MatrixXr& delta) {
  const double load = delta.rowwise().sum().maxCoeff();
  if (!(load > 0.0)) throw ParameterError("upa: precoder is degenerate (all-zero delta)");
  AllocationResult out;
  out.scheme = AllocationScheme::Uniform;
  out.eta = VectorXr::Constant(delta.cols(), 1.0 / load);
  out.iterations = 1;
  return out;
}

Feasibility sinr_feasible(double t, const SinrCoefficients& coeffs, const MatrixXr& delta) {
  if (t < 0.0) throw ParameterError("sinr_feasible: target must be nonnegative");
  const Eigen::Index K = coeffs.users();
  Feasibility out;
  if (t == 0.0) {
    out.feasible = true;
    out.eta = VectorXr::Zero(K);
    return out;
  }
  // Coupling B: phi off the diagonal plus the full CSI-error term gamma.
  MatrixXr B = coeffs.gamma;
  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index i = 0; i < K; ++i)
      if (i != k) B(k, i) += coeffs.phi(k, i);
  MatrixXr A = -t * B;
  A.diagonal() += coeffs.psi;
  const VectorXr rhs = VectorXr::Constant(K, t * coeffs.noise_var / coeffs.rho_f);

  Eigen::FullPivLU<MatrixXr> lu(A);
  if (!lu.isInvertible()) return out;
  VectorXr eta = lu.solve(rhs);
  if (!eta.allFinite() || (eta.array() < 0.0).any()) return out;
  out.eta = std::move(eta);
  out.feasible = max_antenna_load(delta, out.eta) <= 1.0;
  if (!out.feasible) out.eta.resize(0);
  return out;
}

double opa_upper_bound(const SinrCoefficients& coeffs, const MatrixXr& delta) {
  double bound = 0.0;
  for (Eigen::Index k = 0; k < coeffs.users(); ++k) {
    const double dmax = delta.col(k).maxCoeff();
    if (dmax > 0.0)
      bound = std::max(bound, coeffs.rho_f * coeffs.psi(k) / (coeffs.noise_var * dmax));
  }
  return 2.0 * bound;
}

AllocationResult opa_bisection(const SinrCoefficients& coeffs, const MatrixXr& delta,
                               const OpaSettings& settings) {
  if (settings.iterations < 1) throw ParameterError("opa_bisection: T_OPA must be at least 1");
  AllocationResult out;
  out.scheme = AllocationScheme::Optimal;

  double lo = settings.t_lo;
  double hi = settings.t_hi ? *settings.t_hi : opa_upper_bound(coeffs, delta);
  if (hi <= lo) hi = lo;

  Feasibility best = sinr_feasible(lo, coeffs, delta);
  if (!best.feasible) throw ParameterError("opa_bisection: lower bracket end is infeasible");

  if (hi > lo) {
    for (int widen = 0; widen < 64; ++widen) {
      Feasibility at_hi = sinr_feasible(hi, coeffs, delta);
      if (!at_hi.feasible) break;
      out.bracket_widened = true;
      lo = hi;
      best = std::move(at_hi);
      hi *= 2.0;
    }
  }

  int it = 0;
  while (it < settings.iterations && hi - lo >= settings.tol && hi > lo) {
    const double mid = 0.5 * (lo + hi);
    Feasibility at_mid = sinr_feasible(mid, coeffs, delta);
    if (at_mid.feasible) {
      lo = mid;
      best = std::move(at_mid);
    } else {
      hi = mid;
    }
    ++it;
  }
  out.iterations = it;
  out.achieved_t = lo;
  out.t_upper = hi;
  out.eta = best.eta;

  if (settings.fill_power) {
    const double load = max_antenna_load(delta, out.eta);
    if (load > 0.0) {
      out.eta /= load;
    } else {
      // t* = 0 (some user cannot be reached); any feasible point is optimal.
      out.eta = upa(delta).eta;
    }
  }
  return out;
}

double MseCost::operator()(const MatrixXc& N) const {
  const double K = static_cast<double>(P.cols());
  const MatrixXc H = G_hat.transpose() * P;
  const double a = std::sqrt(rho_f) / f;
  const double b = rho_f / (f * f);
  const Complex cross = (H * N).trace() * symbol_power;
  const Complex quad = (H.adjoint() * H * N * N.adjoint()).trace() * symbol_power;
  return K * symbol_power + K * noise_var / (f * f) - 2.0 * a * cross.real() + b * quad.real();
}

MatrixXc MseCost::gradient(const MatrixXc& N) const {
  const MatrixXc H = G_hat.transpose() * P;
  const double a = std::sqrt(rho_f) / f;
  const double b = rho_f / (f * f);
  return symbol_power * (-a * H.adjoint() + b * H.adjoint() * H * N);
}

AllocationResult apa_sgd(const MseCost& cost, const MatrixXr& delta, const ApaSettings& settings) {
  if (!(settings.step >= 0.0)) throw ParameterError("apa_sgd: step size must be nonnegative");
  if (settings.iterations < 1) throw ParameterError("apa_sgd: T_APA must be at least 1");
  const Eigen::Index K = cost.P.cols();

  AllocationResult out;
  out.scheme = AllocationScheme::Adaptive;
  VectorXr eta = VectorXr::Constant(K, settings.initial_eta);
  auto as_matrix = [](const VectorXr& e) -> MatrixXc {
    return e.cwiseSqrt().cast<Complex>().asDiagonal();
  };
  out.cost_trace.push_back(cost(as_matrix(eta)));

  for (int i = 0; i < settings.iterations; ++i) {
    const MatrixXc N = as_matrix(eta);
    const MatrixXc stepped = N - settings.step * cost.gradient(N);
    eta = stepped.diagonal().real().cwiseAbs2();
    if (!eta.allFinite() || eta.maxCoeff() > settings.divergence_limit)
      throw DivergenceError("apa_sgd: power coefficients diverged; reduce the step size");
    const double load = max_antenna_load(delta, eta);
    if (load > 1.0) eta /= load;
    out.cost_trace.push_back(cost(as_matrix(eta)));
  }
  out.eta = eta;
  out.iterations = settings.iterations;
  return out;
}

}  // namespace cfmimo
