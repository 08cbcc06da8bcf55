#pragma once

#include "neass/core.hpp"

#include <vector>

namespace neass {

/// Truncated polynomial Σ_{j≤n} ε^j c_j with matrix coefficients.
class OperatorPolynomial {
 public:
  static constexpr int kMaxDegree = 16;

  OperatorPolynomial(Eigen::Index dim, int max_degree);
  /// Coefficients c₀, c₁, ...; max degree is coeffs.size() − 1 unless given.
  explicit OperatorPolynomial(std::vector<Matrix> coeffs, int max_degree = -1);

  int max_degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  Eigen::Index dim() const noexcept { return dim_; }
  const Matrix& coeff(int j) const;
  Matrix& coeff(int j);
  const std::vector<Matrix>& coeffs() const noexcept { return coeffs_; }

  /// Same coefficients, re-truncated or zero-padded to degree n.
  OperatorPolynomial truncated(int n) const;
  /// Multiply by ε^k, dropping what falls beyond the max degree.
  OperatorPolynomial shifted(int k) const;

  OperatorPolynomial& operator+=(const OperatorPolynomial& other);
  OperatorPolynomial operator+(const OperatorPolynomial& other) const;
  OperatorPolynomial operator-(const OperatorPolynomial& other) const;
  OperatorPolynomial operator*(cplx factor) const;

  /// Σ_j ε^j c_j.
  Matrix evaluate(double eps) const;

 private:
  Eigen::Index dim_;
  std::vector<Matrix> coeffs_;
};

/// [P, Q] truncated at min of the two max degrees.
OperatorPolynomial commutator(const OperatorPolynomial& p, const OperatorPolynomial& q);

/// Truncated series Σ_{m≥0} (iσ)^m ad^m_{εS}(X) / (m + shift)!, shift ∈ {0, 1},
/// collected to degree n. σ = +1 gives e^{iεS} X e^{−iεS}; σ = −1 the reverse.
/// εS must have zero constant coefficient. Throws DegreeOverflow for n outside [0, kMaxDegree].
OperatorPolynomial adjoint_series(const OperatorPolynomial& eps_s, const OperatorPolynomial& x, int n,
                                  int orientation, int shift = 0);

}  // namespace neass
