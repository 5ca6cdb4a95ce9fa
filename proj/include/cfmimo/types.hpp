#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cfmimo {

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Real = double;
using Complex = std::complex<Real>;

using MatrixXr = Matrix<Real>;
using MatrixXc = Matrix<Complex>;
using VectorXr = Vector<Real>;
using VectorXc = Vector<Complex>;

// Error categories surfaced by the numerical stages.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BudgetError : std::runtime_error {
  BudgetError(const std::string& what, double required_count)
      : std::runtime_error(what), required(required_count) {}
  double required;
};

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cfmimo
