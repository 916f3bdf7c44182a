#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nhreal {

using cd = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Failure categories. The C API maps these one-to-one onto nhr_status values.
enum class ErrorCode {
  InvalidArgument = 1,
  DimensionMismatch,
  Singular,
  NotPsd,
  NoConvergence,
  NoZeroMode,
  NoThreshold,
  Degenerate,
  AmbiguousTracking,
  Config,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nhreal
