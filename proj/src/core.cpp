#include "neass/core.hpp"

#include <Eigen/Eigenvalues>

namespace neass {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::SiteOutOfRange: return "SiteOutOfRange";
    case ErrorCode::ModeOutOfRange: return "ModeOutOfRange";
    case ErrorCode::OddOperatorEmbedding: return "OddOperatorEmbedding";
    case ErrorCode::OddOperatorInput: return "OddOperatorInput";
    case ErrorCode::SupportNotContained: return "SupportNotContained";
    case ErrorCode::NonHermitianHopping: return "NonHermitianHopping";
    case ErrorCode::SubBoxTooLarge: return "SubBoxTooLarge";
    case ErrorCode::DegenerateGroundState: return "DegenerateGroundState";
    case ErrorCode::InteriorTooLarge: return "InteriorTooLarge";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::GapBelowTolerance: return "GapBelowTolerance";
    case ErrorCode::DegreeOverflow: return "DegreeOverflow";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::SignConventionUndetermined: return "SignConventionUndetermined";
    case ErrorCode::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorCode::UnitarityLost: return "UnitarityLost";
    case ErrorCode::DynamicRangeTooSmall: return "DynamicRangeTooSmall";
    case ErrorCode::FloorContamination: return "FloorContamination";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (is_hermitian(m, 1e-14)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  const Matrix gram = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

bool is_hermitian(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = max_abs(m);
  if (scale == 0.0) return true;
  return max_abs(m - m.adjoint()) <= rel_tol * scale;
}

Matrix expm_hermitian(const Matrix& h, cplx c) {
  if (h.size() == 0) return h;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  Vector phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::exp(c * es.eigenvalues()(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace neass
