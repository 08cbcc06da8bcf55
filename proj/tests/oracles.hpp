#pragma once

// Reference computations that share no code with the library beyond its
// matrix types. Tests compare library output against these.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// One-body description of a 1-D chain without density-density terms.
struct Chain {
  int radius = 1;
  bool torus = false;
  int orbitals = 1;
  std::map<int, Matrix> hopping;  // T(d) for d != 0; T(-d) = T(d)^* is added when missing
  Matrix onsite;                  // uniform, r x r
  Matrix staggered;               // times (-1)^x
  std::map<int, Matrix> site;     // extra on-site term by coordinate
  double mu = 0.0;
};

inline int wrap(int d, int length) {
  d %= length;
  if (d > length / 2) d -= length;
  if (d < -(length / 2)) d += length;
  return d;
}

// h_{(x,i),(y,j)} with modes ordered by coordinate, then orbital.
inline Matrix one_body(const Chain& c) {
  const int length = 2 * c.radius + 1;
  const int r = c.orbitals;
  std::map<int, Matrix> t = c.hopping;
  for (const auto& [d, m] : c.hopping)
    if (!t.count(-d)) t[-d] = m.adjoint();
  Matrix h = Matrix::Zero(length * r, length * r);
  for (int x = -c.radius; x <= c.radius; ++x) {
    const int bx = (x + c.radius) * r;
    Matrix phi = Matrix::Zero(r, r);
    if (c.onsite.size()) phi += c.onsite;
    if (c.staggered.size()) phi += (((x % 2) + 2) % 2 == 0 ? 1.0 : -1.0) * c.staggered;
    if (auto it = c.site.find(x); it != c.site.end()) phi += it->second;
    phi -= c.mu * Matrix::Identity(r, r);
    h.block(bx, bx, r, r) += phi;
    for (int y = -c.radius; y <= c.radius; ++y) {
      if (y == x) continue;
      const int d = c.torus ? wrap(x - y, length) : x - y;
      if (auto it = t.find(d); it != t.end()) h.block(bx, (y + c.radius) * r, r, r) += it->second;
    }
  }
  return h;
}

struct FreeFermionResult {
  double ground_energy = 0.0;
  double gap = 0.0;
};

// Fill every negative level; the cheapest excitation adds or removes one particle.
inline FreeFermionResult fill_levels(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  FreeFermionResult out;
  out.gap = std::abs(es.eigenvalues()(0));
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double e = es.eigenvalues()(i);
    if (e < 0.0) out.ground_energy += e;
    out.gap = std::min(out.gap, std::abs(e));
  }
  return out;
}

// Ground vector of a Hermitian matrix straight from Eigen.
inline Vector ground_vector(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  return es.eigenvectors().col(0);
}

inline double ground_expectation(const Matrix& h, const Matrix& a) {
  const Vector psi = ground_vector(h);
  return psi.dot(a * psi).real();
}

// d/deps <A> in the ground state of h0 + eps v at eps = 0: central differences
// at step, step/2, step/4 combined by two Richardson levels.
inline double perturbed_ground_slope(const Matrix& h0, const Matrix& v, const Matrix& a, double step = 1e-2) {
  auto central = [&](double e) {
    return (ground_expectation(h0 + e * v, a) - ground_expectation(h0 - e * v, a)) / (2.0 * e);
  };
  const double d0 = central(step), d1 = central(step / 2), d2 = central(step / 4);
  const double r0 = (4.0 * d1 - d0) / 3.0, r1 = (4.0 * d2 - d1) / 3.0;
  return (16.0 * r1 - r0) / 15.0;
}

// Two-level closed forms in the eigenbasis of diag(e0, e1).
inline Matrix two_level_inverse(double e0, double e1, const Matrix& b) {
  Matrix out = Matrix::Zero(2, 2);
  out(0, 1) = cplx(0.0, 1.0) * b(0, 1) / (e0 - e1);
  out(1, 0) = cplx(0.0, 1.0) * b(1, 0) / (e1 - e0);
  return out;
}

inline Matrix random_hermitian(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  return 0.5 * (m + m.adjoint());
}

inline Matrix random_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

// exp(-i c H) by eigendecomposition, c real.
inline Matrix unitary_exp(const Matrix& h, double c) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phase(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phase.size(); ++i) phase(i) = std::exp(cplx(0.0, -c * es.eigenvalues()(i)));
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

// Composite Gauss-Legendre (5 points per panel) for smooth integrands.
template <class F>
double integrate(F&& f, double a, double b, int panels = 200) {
  static const double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                              0.9061798459386640};
  static const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                              0.2369268850561891};
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int i = 0; i < 5; ++i) sum += w[i] * f(mid + 0.5 * h * x[i]);
  }
  return 0.5 * h * sum;
}

// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
