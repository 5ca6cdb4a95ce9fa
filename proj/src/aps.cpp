#include "cfmimo/aps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cfmimo {

SelectionMask mask_from_selection(std::vector<std::vector<int>> selected_aps, int num_aps,
                                  int antennas_per_ap) {
  const int K = static_cast<int>(selected_aps.size());
  SelectionMask mask;
  mask.Q = MatrixXr::Zero(static_cast<Eigen::Index>(num_aps) * antennas_per_ap, K);
  for (int k = 0; k < K; ++k) {
    auto& aps = selected_aps[k];
    std::sort(aps.begin(), aps.end());
    for (int l : aps) {
      if (l < 0 || l >= num_aps) throw ParameterError("mask_from_selection: AP index out of range");
      mask.Q.block(static_cast<Eigen::Index>(l) * antennas_per_ap, k, antennas_per_ap, 1).setOnes();
    }
  }
  mask.selected_aps = std::move(selected_aps);
  mask.antennas_per_ap = antennas_per_ap;
  return mask;
}

SelectionMask full_mask(int num_aps, int antennas_per_ap, int num_users) {
  std::vector<int> all(num_aps);
  std::iota(all.begin(), all.end(), 0);
  return mask_from_selection(std::vector<std::vector<int>>(num_users, all), num_aps,
                             antennas_per_ap);
}

MaskedChannel apply_mask(const SelectionMask& mask, const ChannelRealization& r) {
  if (mask.Q.rows() != r.beta.rows() || mask.Q.cols() != r.beta.cols())
    throw ParameterError("apply_mask: mask and realization dimensions differ");
  return MaskedChannel{apply_mask(mask.Q, r.beta), apply_mask(mask.Q, r.alpha),
                       apply_mask(mask.Q, r.G_hat), apply_mask(mask.Q, r.G_tilde)};
}

SelectionMask ls_aps(const MatrixXr& beta, int selected_aps, int antennas_per_ap) {
  if (antennas_per_ap <= 0 || beta.rows() % antennas_per_ap != 0)
    throw ParameterError("ls_aps: row count is not a multiple of antennas_per_ap");
  const int L = static_cast<int>(beta.rows() / antennas_per_ap);
  const int K = static_cast<int>(beta.cols());
  if (selected_aps < 1 || selected_aps > L) throw ParameterError("ls_aps: S must lie in [1, L]");

  std::vector<std::vector<int>> chosen(K);
  std::vector<int> order(L);
  for (int k = 0; k < K; ++k) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return beta(static_cast<Eigen::Index>(a) * antennas_per_ap, k) >
             beta(static_cast<Eigen::Index>(b) * antennas_per_ap, k);
    });
    chosen[k].assign(order.begin(), order.begin() + selected_aps);
  }
  return mask_from_selection(std::move(chosen), L, antennas_per_ap);
}

double es_candidate_count(int num_aps, int selected_aps, int num_users) {
  double per_user = 1.0;
  for (int i = 1; i <= selected_aps; ++i)
    per_user = per_user * (num_aps - selected_aps + i) / i;
  return std::pow(std::round(per_user), num_users);
}

std::vector<std::vector<int>> ap_combinations(int num_aps, int selected_aps) {
  std::vector<std::vector<int>> out;
  std::vector<int> current(selected_aps);
  std::iota(current.begin(), current.end(), 0);
  if (selected_aps > num_aps || selected_aps < 1) return out;
  while (true) {
    out.push_back(current);
    int i = selected_aps - 1;
    while (i >= 0 && current[i] == num_aps - selected_aps + i) --i;
    if (i < 0) break;
    ++current[i];
    for (int j = i + 1; j < selected_aps; ++j) current[j] = current[j - 1] + 1;
  }
  return out;
}

EsResult es_aps(int num_aps, int selected_aps, int num_users, int antennas_per_ap,
                const CandidateEvaluator& evaluate, double budget) {
  if (selected_aps < 1 || selected_aps > num_aps) throw ParameterError("es_aps: S must lie in [1, L]");
  const double count = es_candidate_count(num_aps, selected_aps, num_users);
  if (count > budget)
    throw BudgetError("es_aps: " + std::to_string(static_cast<long double>(count)) +
                          " candidates required, budget is " +
                          std::to_string(static_cast<long double>(budget)),
                      count);

  const auto combos = ap_combinations(num_aps, selected_aps);
  const int C = static_cast<int>(combos.size());
  std::vector<int> digit(num_users, 0);

  EsResult best;
  bool have_best = false;
  while (true) {
    std::vector<std::vector<int>> choice(num_users);
    for (int k = 0; k < num_users; ++k) choice[k] = combos[digit[k]];
    SelectionMask mask = mask_from_selection(std::move(choice), num_aps, antennas_per_ap);
    const double score = evaluate(mask);
    ++best.candidates;
    if (!have_best || score > best.min_sinr) {
      best.mask = std::move(mask);
      best.min_sinr = score;
      have_best = true;
    }
    int k = num_users - 1;
    while (k >= 0 && digit[k] == C - 1) digit[k--] = 0;
    if (k < 0) break;
    ++digit[k];
  }
  return best;
}

}  // namespace cfmimo
