#pragma once

#include <functional>
#include <vector>

#include "cfmimo/topology_channel.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

/// Binary M x K access-point selection. Column k holds user k's selection,
/// constant over each AP's block of N rows.
struct SelectionMask {
  MatrixXr Q;
  std::vector<std::vector<int>> selected_aps;  // per user, ascending AP indices
  int antennas_per_ap = 1;
};

/// Builds a mask from per-user AP index lists.
SelectionMask mask_from_selection(std::vector<std::vector<int>> selected_aps, int num_aps,
                                  int antennas_per_ap);

/// Mask selecting every AP for every user.
SelectionMask full_mask(int num_aps, int antennas_per_ap, int num_users);

/// Elementwise product with the mask. Works for any dense expression.
template <class Derived>
auto apply_mask(const MatrixXr& Q, const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return Matrix<Scalar>(x.cwiseProduct(Q.cast<Scalar>()));
}

/// Channel quantities after selection (beta', alpha', G_hat', G_tilde').
struct MaskedChannel {
  MatrixXr beta;
  MatrixXr alpha;
  MatrixXc G_hat;
  MatrixXc G_tilde;

  [[nodiscard]] MatrixXr error_variance() const { return beta - alpha; }
  [[nodiscard]] MatrixXc G() const { return G_hat + G_tilde; }
};

MaskedChannel apply_mask(const SelectionMask& mask, const ChannelRealization& r);

/// Large-scale-fading selection: per user, the S APs with the largest beta.
/// Ties resolve to the lower AP index.
SelectionMask ls_aps(const MatrixXr& beta, int selected_aps, int antennas_per_ap);

/// Number of exhaustive-search candidates, C(L, S)^K, as a double.
double es_candidate_count(int num_aps, int selected_aps, int num_users);

/// All S-subsets of {0..L-1} in lexicographic order.
std::vector<std::vector<int>> ap_combinations(int num_aps, int selected_aps);

struct EsResult {
  SelectionMask mask;
  double min_sinr = 0.0;
  long long candidates = 0;
};

/// Scores a candidate mask by running the complete downstream chain and
/// returning min_k SINR_k.
using CandidateEvaluator = std::function<double(const SelectionMask&)>;

/// Exhaustive search over every per-user choice of S APs. Candidates are
/// enumerated lexicographically with user 0 as the most significant digit;
/// the first maximizer wins.
EsResult es_aps(int num_aps, int selected_aps, int num_users, int antennas_per_ap,
                const CandidateEvaluator& evaluate, double budget = 1e6);

}  // namespace cfmimo
