#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace fpt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

enum class ErrorCode {
  NotStochastic,
  Reducible,
  Periodic,
  AllErasing,
  BadDimensions,
  BadArgs,
  BadParams,
  DomainError,
  NonConvergent,
  NoConvergence,
  TolUnreachable,
  TailTooHeavy,
  NegativeProbability,
  SingularSystem,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable reason alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Maximum absolute row-sum norm.
inline double inf_norm(const Matrix& m) {
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace fpt
