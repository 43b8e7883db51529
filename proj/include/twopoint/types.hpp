#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace twopoint {

using Complex = std::complex<double>;

/// Dense operator in a fixed computational basis (full space or a sector).
using OperatorMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

/// Precondition or contract violation in library input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown (non-finite values, degenerate spectra where uniqueness is required).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Largest absolute entry.
inline double max_abs(const OperatorMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace twopoint
