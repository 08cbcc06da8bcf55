#include "neass/series.hpp"

#include <algorithm>

namespace neass {

OperatorPolynomial::OperatorPolynomial(Eigen::Index dim, int max_degree) : dim_(dim) {
  if (max_degree < 0 || max_degree > kMaxDegree)
    throw Error(ErrorCode::DegreeOverflow, "degree " + std::to_string(max_degree));
  coeffs_.assign(static_cast<std::size_t>(max_degree) + 1, Matrix::Zero(dim, dim));
}

OperatorPolynomial::OperatorPolynomial(std::vector<Matrix> coeffs, int max_degree) {
  if (coeffs.empty()) throw Error(ErrorCode::InvalidArgument, "polynomial needs a coefficient");
  dim_ = coeffs.front().rows();
  for (const auto& c : coeffs)
    if (c.rows() != dim_ || c.cols() != dim_) throw Error(ErrorCode::ShapeMismatch, "coefficient shape");
  if (max_degree < 0) max_degree = static_cast<int>(coeffs.size()) - 1;
  if (max_degree > kMaxDegree) throw Error(ErrorCode::DegreeOverflow, "degree " + std::to_string(max_degree));
  coeffs.resize(static_cast<std::size_t>(max_degree) + 1, Matrix::Zero(dim_, dim_));
  coeffs_ = std::move(coeffs);
}

const Matrix& OperatorPolynomial::coeff(int j) const {
  if (j < 0 || j > max_degree()) throw Error(ErrorCode::DegreeOverflow, "coefficient " + std::to_string(j));
  return coeffs_[static_cast<std::size_t>(j)];
}

Matrix& OperatorPolynomial::coeff(int j) {
  if (j < 0 || j > max_degree()) throw Error(ErrorCode::DegreeOverflow, "coefficient " + std::to_string(j));
  return coeffs_[static_cast<std::size_t>(j)];
}

OperatorPolynomial OperatorPolynomial::truncated(int n) const {
  std::vector<Matrix> c(coeffs_.begin(), coeffs_.begin() + std::min<std::ptrdiff_t>(n + 1, coeffs_.size()));
  return OperatorPolynomial(std::move(c), n);
}

OperatorPolynomial OperatorPolynomial::shifted(int k) const {
  OperatorPolynomial out(dim_, max_degree());
  for (int j = 0; j + k <= max_degree(); ++j) out.coeffs_[static_cast<std::size_t>(j + k)] = coeffs_[static_cast<std::size_t>(j)];
  return out;
}

OperatorPolynomial& OperatorPolynomial::operator+=(const OperatorPolynomial& other) {
  if (other.dim_ != dim_) throw Error(ErrorCode::ShapeMismatch, "polynomial dimension");
  const int n = std::min(max_degree(), other.max_degree());
  coeffs_.resize(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) coeffs_[static_cast<std::size_t>(j)] += other.coeffs_[static_cast<std::size_t>(j)];
  return *this;
}

OperatorPolynomial OperatorPolynomial::operator+(const OperatorPolynomial& other) const {
  OperatorPolynomial out = *this;
  out += other;
  return out;
}

OperatorPolynomial OperatorPolynomial::operator-(const OperatorPolynomial& other) const {
  return *this + other * cplx(-1.0);
}

OperatorPolynomial OperatorPolynomial::operator*(cplx factor) const {
  OperatorPolynomial out = *this;
  for (auto& c : out.coeffs_) c *= factor;
  return out;
}

Matrix OperatorPolynomial::evaluate(double eps) const {
  Matrix out = Matrix::Zero(dim_, dim_);
  for (int j = max_degree(); j >= 0; --j) out = out * eps + coeffs_[static_cast<std::size_t>(j)];
  return out;
}

OperatorPolynomial commutator(const OperatorPolynomial& p, const OperatorPolynomial& q) {
  if (p.dim() != q.dim()) throw Error(ErrorCode::ShapeMismatch, "polynomial dimension");
  const int n = std::min(p.max_degree(), q.max_degree());
  OperatorPolynomial out(p.dim(), n);
  for (int i = 0; i <= n; ++i) {
    if (p.coeff(i).isZero(0.0)) continue;
    for (int j = 0; i + j <= n; ++j) out.coeff(i + j) += commutator(p.coeff(i), q.coeff(j));
  }
  return out;
}

OperatorPolynomial adjoint_series(const OperatorPolynomial& eps_s, const OperatorPolynomial& x, int n,
                                  int orientation, int shift) {
  if (n < 0 || n > OperatorPolynomial::kMaxDegree)
    throw Error(ErrorCode::DegreeOverflow, "series degree " + std::to_string(n));
  if (orientation != 1 && orientation != -1) throw Error(ErrorCode::InvalidArgument, "orientation must be +-1");
  if (shift != 0 && shift != 1) throw Error(ErrorCode::InvalidArgument, "shift must be 0 or 1");
  if (!eps_s.coeff(0).isZero(0.0)) throw Error(ErrorCode::InvalidArgument, "eps*S must start at degree 1");

  const OperatorPolynomial s = eps_s.truncated(n);
  OperatorPolynomial term = x.truncated(n);
  OperatorPolynomial out = term;
  double factorial = 1.0;  // (m + shift)! / shift!
  const cplx step = cplx(0.0, static_cast<double>(orientation));
  // each ad raises the lowest degree by one, so m ≤ n terms suffice
  for (int m = 1; m <= n; ++m) {
    term = commutator(s, term) * step;
    factorial *= static_cast<double>(m + shift);
    out += term * cplx(1.0 / factorial);
  }
  return out;
}

}  // namespace neass
