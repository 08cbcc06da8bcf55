#pragma once

#include "neass/core.hpp"
#include "neass/fock.hpp"
#include "neass/interactions.hpp"

#include <optional>
#include <vector>

namespace neass {

struct SpectralOptions {
  /// Absolute floor on E₁ − E₀ below which the ground state counts as degenerate.
  double degeneracy_tolerance = 1e-8;
  /// When false, a degenerate ground state is reported through `gap` instead of thrown.
  bool require_simple = true;
};

/// Full Hermitian eigendecomposition. Each eigenvector's largest-modulus
/// component is real positive (first such index on ties).
struct SpectralData {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // columns
  double gap = 0.0;        // E₁ − E₀
  Matrix ground_projector;

  Vector ground_vector() const { return eigenvectors.col(0); }
  double ground_energy() const { return eigenvalues(0); }
};

SpectralData diagonalize(const Matrix& h, const SpectralOptions& options = {});
inline SpectralData diagonalize(const LocalOperator& h, const SpectralOptions& options = {}) {
  return diagonalize(h.matrix(), options);
}

/// ρ₀(A) = ⟨ψ₀|A|ψ₀⟩.
class GroundState {
 public:
  explicit GroundState(Vector psi);
  explicit GroundState(const SpectralData& spectral) : GroundState(spectral.ground_vector()) {}

  const Vector& vector() const noexcept { return psi_; }
  cplx expectation(const Matrix& a) const { return psi_.dot(a * psi_); }
  cplx operator()(const Matrix& a) const { return expectation(a); }

 private:
  Vector psi_;
};

struct GapScanEntry {
  int k = 0;
  double t = 0.0;
  double gap = 0.0;
  double ground_energy = 0.0;
  bool degenerate = false;
};

struct GapScanResult {
  std::vector<GapScanEntry> entries;  // ordered by (k, t)
  double min_gap = 0.0;
  bool uniform_gap_holds = false;  // min gap >= threshold over k >= L
};

/// A parametrized model family: given k, build the time-dependent Hamiltonian.
struct ModelFamily {
  int dimension = 1;
  Boundary boundary = Boundary::Torus;
  int orbitals = 1;
  ModelParams params;
  /// Optional time-dependent H₀ drive added as (profile, params) pairs.
  std::vector<std::pair<Switching, ModelParams>> drives;
};

TimeDependentHamiltonian build_family_member(const ModelFamily& family, int k);

GapScanResult uniform_gap_scan(const ModelFamily& family, const std::vector<int>& k_list,
                               const std::vector<double>& t_grid, double threshold, int min_k,
                               unsigned threads = 1);

struct BulkGapOptions {
  /// Cap on the local operator-space dimension (2^{modes(Λ_l)})².
  std::size_t operator_space_cap = 4096;
  /// Relative floor for the variance form; smaller eigenvalues are deflated.
  double kernel_threshold = 1e-10;
};

/// inf over nonconstant A ∈ 𝒜_{Λ_l} of ρ₀(A*[H,A]) / (ρ₀(A*A) − |ρ₀(A)|²), over
/// the full local algebra (even and odd monomials in the modes of Λ_l).
double bulk_gap_ratio(const Matrix& h0, const FockSpace& space, const GroundState& rho0,
                      const std::vector<std::size_t>& interior, const BulkGapOptions& options = {});
double bulk_gap_ratio(const Matrix& h0, const FockSpace& space, const GroundState& rho0, int l,
                      const BulkGapOptions& options = {});

}  // namespace neass
