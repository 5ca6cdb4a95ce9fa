#include "cfmimo/random.hpp"

#include <cmath>

namespace cfmimo {

Rng make_stream(std::uint64_t seed, std::uint64_t trial, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

Complex complex_normal(Rng& rng) {
  std::normal_distribution<Real> gauss(0.0, std::sqrt(0.5));
  const Real re = gauss(rng);
  const Real im = gauss(rng);
  return {re, im};
}

MatrixXc complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  MatrixXc out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = complex_normal(rng);
  return out;
}

}  // namespace cfmimo
