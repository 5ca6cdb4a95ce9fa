#pragma once

#include <random>

#include "cfmimo/types.hpp"

namespace testutil {

using namespace cfmimo;

inline MatrixXc random_complex(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  MatrixXc A(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) A(i, j) = Complex(g(rng), g(rng));
  return A;
}

inline MatrixXr random_positive(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                                double lo = 0.1, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  MatrixXr A(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) A(i, j) = u(rng);
  return A;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testutil
