#include "neass/spectral.hpp"

#include "neass/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace neass {

namespace {

void fix_phase(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double a = std::abs(vectors(r, c));
      // strict comparison with a small margin keeps the choice stable under roundoff
      if (a > best * (1.0 + 1e-10)) {
        best = a;
        arg = r;
      }
    }
    if (best > 0.0) vectors.col(c) *= std::conj(vectors(arg, c)) / best;
  }
}

}  // namespace

SpectralData diagonalize(const Matrix& h, const SpectralOptions& options) {
  if (h.rows() != h.cols() || h.rows() == 0) throw Error(ErrorCode::ShapeMismatch, "diagonalize needs a square matrix");
  if (!is_hermitian(h, 1e-10)) throw Error(ErrorCode::InvalidArgument, "diagonalize needs a Hermitian matrix");
  const Matrix hs = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(hs);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::InvalidArgument, "eigensolver failed");

  SpectralData out;
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  fix_phase(out.eigenvectors);
  out.gap = out.eigenvalues.size() > 1 ? out.eigenvalues(1) - out.eigenvalues(0)
                                       : std::numeric_limits<double>::infinity();
  if (options.require_simple && out.gap < options.degeneracy_tolerance)
    throw Error(ErrorCode::DegenerateGroundState,
                "E1 - E0 = " + std::to_string(out.gap) + " below tolerance");
  const Vector g = out.eigenvectors.col(0);
  out.ground_projector = g * g.adjoint();
  return out;
}

GroundState::GroundState(Vector psi) : psi_(std::move(psi)) {
  const double n = psi_.norm();
  if (n == 0.0) throw Error(ErrorCode::InvalidArgument, "zero ground vector");
  psi_ /= n;
}

TimeDependentHamiltonian build_family_member(const ModelFamily& family, int k) {
  auto lattice = std::make_shared<const Lattice>(
      build_lattice(family.dimension, k, family.boundary, family.orbitals));
  const FockSpace space = FockSpace::full(lattice, family.orbitals);
  std::vector<TimeDependentHamiltonian::Component> h0;
  h0.push_back({switching::Constant{1.0}, build_example_hamiltonian(lattice, family.params)});
  for (const auto& [profile, params] : family.drives)
    h0.push_back({profile, build_example_hamiltonian(lattice, params)});
  return TimeDependentHamiltonian(space, std::move(h0), {});
}

GapScanResult uniform_gap_scan(const ModelFamily& family, const std::vector<int>& k_list,
                               const std::vector<double>& t_grid, double threshold, int min_k,
                               unsigned threads) {
  std::vector<TimeDependentHamiltonian> members;
  members.reserve(k_list.size());
  for (int k : k_list) members.push_back(build_family_member(family, k));

  GapScanResult result;
  result.entries.resize(k_list.size() * t_grid.size());
  parallel_for(result.entries.size(), threads, [&](std::size_t idx) {
    const std::size_t ki = idx / t_grid.size();
    const std::size_t ti = idx % t_grid.size();
    GapScanEntry e;
    e.k = k_list[ki];
    e.t = t_grid[ti];
    const SpectralData sd = diagonalize(members[ki].h0(e.t), {.require_simple = false});
    e.gap = sd.gap;
    e.ground_energy = sd.ground_energy();
    e.degenerate = sd.gap < SpectralOptions{}.degeneracy_tolerance;
    result.entries[idx] = e;
  });

  result.min_gap = std::numeric_limits<double>::infinity();
  bool holds = true;
  for (const auto& e : result.entries) {
    if (e.k < min_k) continue;
    result.min_gap = std::min(result.min_gap, e.gap);
    holds = holds && !e.degenerate && e.gap >= threshold;
  }
  result.uniform_gap_holds = holds;
  return result;
}

double bulk_gap_ratio(const Matrix& h0, const FockSpace& space, const GroundState& rho0,
                      const std::vector<std::size_t>& interior, const BulkGapOptions& options) {
  std::vector<int> modes;
  for (std::size_t s : interior)
    for (int i = 0; i < space.orbitals(); ++i) modes.push_back(space.mode(s, i));
  const std::size_t local_dim = std::size_t{1} << modes.size();
  if (local_dim * local_dim > options.operator_space_cap)
    throw Error(ErrorCode::InteriorTooLarge, "operator space of dimension " +
                                                 std::to_string(local_dim * local_dim) + " exceeds cap");

  const auto a = annihilators(space);
  const Vector& psi = rho0.vector();

  // Monomials Π_m o_m with o_m ∈ {1, a_m, a*_m, a*_m a_m} span 𝒜_{Λ_l}; store B ψ₀.
  std::size_t count = 1;
  for (std::size_t m = 0; m < modes.size(); ++m) count *= 4;
  Matrix vecs(psi.size(), static_cast<Eigen::Index>(count));
  for (std::size_t idx = 0; idx < count; ++idx) {
    Vector v = psi;
    std::size_t code = idx;
    // apply the factor of the last mode first so the product reads left to right
    std::vector<int> choice(modes.size());
    for (std::size_t m = 0; m < modes.size(); ++m) {
      choice[m] = static_cast<int>(code % 4);
      code /= 4;
    }
    for (std::size_t m = modes.size(); m-- > 0;) {
      const Matrix& am = a[static_cast<std::size_t>(modes[m])];
      switch (choice[m]) {
        case 0: break;
        case 1: v = am * v; break;
        case 2: v = am.adjoint() * v; break;
        case 3: v = am.adjoint() * (am * v); break;
      }
    }
    vecs.col(static_cast<Eigen::Index>(idx)) = v;
  }

  // With y = (1 − P₀)Bψ₀ the form is ⟨y|H − E₀|y⟩ / ‖y‖², so the ratio is the
  // smallest eigenvalue of H − E₀ compressed to the span of the y's.
  const double e0 = rho0.expectation(h0).real();
  const Vector w = vecs.adjoint() * psi;
  const Matrix y = vecs - psi * w.adjoint();

  Matrix basis;
  if (y.cols() <= y.rows()) {
    Matrix gram = y.adjoint() * y;
    gram = 0.5 * (gram + gram.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> gs(gram);
    const RealVector d = gs.eigenvalues();
    const double dmax = d.cwiseAbs().maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < d.size(); ++i)
      if (d(i) > options.kernel_threshold * dmax) keep.push_back(i);
    basis.resize(y.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c)
      basis.col(static_cast<Eigen::Index>(c)) = y * gs.eigenvectors().col(keep[c]) / std::sqrt(d(keep[c]));
  } else {
    // more operators than states: work with the range projector instead
    Matrix outer = y * y.adjoint();
    outer = 0.5 * (outer + outer.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> os(outer);
    const RealVector d = os.eigenvalues();
    const double dmax = d.cwiseAbs().maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < d.size(); ++i)
      if (d(i) > options.kernel_threshold * dmax) keep.push_back(i);
    basis = os.eigenvectors()(Eigen::all, keep);
  }
  if (basis.cols() == 0) return std::numeric_limits<double>::infinity();

  Matrix reduced = basis.adjoint() * (h0 * basis - e0 * basis);
  reduced = 0.5 * (reduced + reduced.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> rsolve(reduced, Eigen::EigenvaluesOnly);
  return rsolve.eigenvalues().minCoeff();
}

double bulk_gap_ratio(const Matrix& h0, const FockSpace& space, const GroundState& rho0, int l,
                      const BulkGapOptions& options) {
  return bulk_gap_ratio(h0, space, rho0, space.lattice().sub_box(l), options);
}

}  // namespace neass
