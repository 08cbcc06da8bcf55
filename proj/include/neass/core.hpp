#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace neass {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx I_unit{0.0, 1.0};

enum class ErrorCode {
  DimensionTooLarge,
  SiteOutOfRange,
  ModeOutOfRange,
  OddOperatorEmbedding,
  OddOperatorInput,
  SupportNotContained,
  NonHermitianHopping,
  SubBoxTooLarge,
  DegenerateGroundState,
  InteriorTooLarge,
  ShapeMismatch,
  GapBelowTolerance,
  DegreeOverflow,
  ResidualTooLarge,
  SignConventionUndetermined,
  StepLimitExceeded,
  UnitarityLost,
  DynamicRangeTooSmall,
  FloorContamination,
  InvalidArgument,
  ConfigError,
  IoFailure,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library is reported through this type; `code()`
/// identifies the condition, `what()` carries the human-readable context.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Largest singular value.
double operator_norm(const Matrix& m);

/// Commutator AB - BA.
inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

inline Matrix anticommutator(const Matrix& a, const Matrix& b) { return a * b + b * a; }

/// Largest entry modulus; used for entrywise identity checks.
inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_hermitian(const Matrix& m, double rel_tol = 1e-12);

/// exp(c·H) for Hermitian H through its eigendecomposition.
Matrix expm_hermitian(const Matrix& h, cplx c);

}  // namespace neass
