#include "neass/liouvillian.hpp"

namespace neass {

LiouvillianContext::LiouvillianContext(SpectralData spectral, double tolerance)
    : spectral_(std::move(spectral)), tolerance_(tolerance) {
  if (!(spectral_.gap >= tolerance_))
    throw Error(ErrorCode::GapBelowTolerance,
                "gap " + std::to_string(spectral_.gap) + " below " + std::to_string(tolerance_));
  ground_ = spectral_.ground_vector();
}

LiouvillianContext::LiouvillianContext(const Matrix& h0, double tolerance)
    : LiouvillianContext(diagonalize(h0, {.require_simple = false}), tolerance) {}

Matrix liouvillian_apply(const Matrix& h, const Matrix& a) {
  if (h.rows() != h.cols() || a.rows() != a.cols() || h.rows() != a.rows())
    throw Error(ErrorCode::ShapeMismatch, "operands of different dimension");
  return commutator(h, a);
}

Matrix liouvillian_apply(const LiouvillianContext& ctx, const Matrix& a) {
  if (a.rows() != ctx.dim() || a.cols() != ctx.dim())
    throw Error(ErrorCode::ShapeMismatch, "operand does not match the context");
  const auto& sd = ctx.spectral();
  const Matrix at = sd.eigenvectors.adjoint() * a * sd.eigenvectors;
  Matrix out(at.rows(), at.cols());
  for (Eigen::Index c = 0; c < at.cols(); ++c)
    for (Eigen::Index r = 0; r < at.rows(); ++r)
      out(r, c) = (sd.eigenvalues(r) - sd.eigenvalues(c)) * at(r, c);
  return sd.eigenvectors * out * sd.eigenvectors.adjoint();
}

LocalOperator liouvillian_apply(const LocalOperator& h, const LocalOperator& a) {
  if (!h.space().same_as(a.space()))
    throw Error(ErrorCode::ShapeMismatch, "operators live on different Fock spaces");
  return LocalOperator(h.space(), liouvillian_apply(h.matrix(), a.matrix()));
}

Matrix quasi_local_inverse(const LiouvillianContext& ctx, const Matrix& b) {
  if (b.rows() != ctx.dim() || b.cols() != ctx.dim())
    throw Error(ErrorCode::ShapeMismatch, "operand does not match the context");
  const auto& sd = ctx.spectral();
  const Matrix& v = sd.eigenvectors;
  const Vector g = ctx.ground();
  // only row 0 and column 0 of V†BV are needed
  const Eigen::RowVectorXcd row = (g.adjoint() * b) * v;
  const Vector col = v.adjoint() * (b * g);
  const double e0 = sd.eigenvalues(0);
  Vector upper = Vector::Zero(v.cols());  // ⟨0|I|m⟩
  Vector lower = Vector::Zero(v.cols());  // ⟨m|I|0⟩
  for (Eigen::Index m = 1; m < v.cols(); ++m) {
    const double de = e0 - sd.eigenvalues(m);
    upper(m) = I_unit * row(m) / de;
    lower(m) = -I_unit * col(m) / de;
  }
  // back to the site basis: V (e₀ upperᵀ + lower e₀ᵀ) V†
  const Vector right = v.conjugate() * upper;
  const Vector left = v * lower;
  return g * right.transpose() + left * g.adjoint();
}

LocalOperator quasi_local_inverse(const LiouvillianContext& ctx, const LocalOperator& b) {
  return LocalOperator(b.space(), quasi_local_inverse(ctx, b.matrix()));
}

cplx ground_commutator(const LiouvillianContext& ctx, const Matrix& x, const Matrix& c) {
  const Vector& g = ctx.ground();
  return g.dot(x * (c * g)) - g.dot(c * (x * g));
}

double ground_offdiagonal_norm(const LiouvillianContext& ctx, const Matrix& x) {
  const Vector& g = ctx.ground();
  const Vector xg = x * g;
  return (xg - g * g.dot(xg)).norm();
}

std::vector<std::pair<int, double>> inverse_locality_report(const LiouvillianContext& ctx,
                                                            const FockSpace& space, const Matrix& b,
                                                            const std::vector<int>& l_values) {
  Matrix ib = quasi_local_inverse(ctx, b);
  // I maps even to even; keep only that part so rounding noise cannot flip the parity flag
  if (classify(space, b).even) {
    const Matrix p = space.parity_operator();
    ib = (0.5 * (ib + p * ib * p)).eval();
  }
  return locality_profile(LocalOperator(space, std::move(ib)), l_values);
}

}  // namespace neass
