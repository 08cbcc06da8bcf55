#pragma once

#include "neass/core.hpp"
#include "neass/fock.hpp"
#include "neass/spectral.hpp"

#include <utility>
#include <vector>

namespace neass {

/// Spectral data of H₀(s) together with the gap floor it was accepted under.
class LiouvillianContext {
 public:
  /// Throws GapBelowTolerance when spectral.gap < tolerance.
  LiouvillianContext(SpectralData spectral, double tolerance = 1e-6);
  /// Diagonalizes h0 first.
  explicit LiouvillianContext(const Matrix& h0, double tolerance = 1e-6);

  const SpectralData& spectral() const noexcept { return spectral_; }
  double tolerance() const noexcept { return tolerance_; }
  double gap() const noexcept { return spectral_.gap; }
  const Vector& ground() const noexcept { return ground_; }
  GroundState ground_state() const { return GroundState(ground_); }
  Eigen::Index dim() const noexcept { return spectral_.eigenvectors.rows(); }

 private:
  SpectralData spectral_;
  double tolerance_;
  Vector ground_;
};

/// [H, A]; throws ShapeMismatch on incompatible operands.
Matrix liouvillian_apply(const Matrix& h, const Matrix& a);
Matrix liouvillian_apply(const LiouvillianContext& ctx, const Matrix& a);
LocalOperator liouvillian_apply(const LocalOperator& h, const LocalOperator& a);

/// I(B): in the eigenbasis of H₀, ⟨0|I(B)|m⟩ = i⟨0|B|m⟩/(E₀ − E_m),
/// ⟨m|I(B)|0⟩ = i⟨m|B|0⟩/(E_m − E₀), every other block zero.
Matrix quasi_local_inverse(const LiouvillianContext& ctx, const Matrix& b);
LocalOperator quasi_local_inverse(const LiouvillianContext& ctx, const LocalOperator& b);

/// ρ₀([X, C]); the quantity every stationarity certificate is built from.
cplx ground_commutator(const LiouvillianContext& ctx, const Matrix& x, const Matrix& c);

/// ‖P₀ X (1 − P₀)‖ for Hermitian X, i.e. the only block ρ₀([X, ·]) sees.
double ground_offdiagonal_norm(const LiouvillianContext& ctx, const Matrix& x);

/// locality_profile of I(B) over the full space of the context.
std::vector<std::pair<int, double>> inverse_locality_report(const LiouvillianContext& ctx,
                                                            const FockSpace& space, const Matrix& b,
                                                            const std::vector<int>& l_values);

}  // namespace neass
