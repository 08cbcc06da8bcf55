#pragma once

#include "neass/core.hpp"
#include "neass/fock.hpp"
#include "neass/lattice.hpp"
#include "neass/switching.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace neass {

/// Finite map X ↦ Φ(X) of self-adjoint, even, number-conserving local terms.
class Interaction {
 public:
  Interaction(std::shared_ptr<const Lattice> lattice, int orbitals);

  const Lattice& lattice() const noexcept { return *lattice_; }
  const std::shared_ptr<const Lattice>& lattice_ptr() const noexcept { return lattice_; }
  int orbitals() const noexcept { return orbitals_; }

  /// Adds (or accumulates into) the term at op's support. Validates flags.
  void add(const LocalOperator& op);

  const std::map<std::vector<std::size_t>, LocalOperator>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  Interaction scaled(double factor) const;
  Interaction operator+(const Interaction& other) const;
  Interaction operator-(const Interaction& other) const;

  /// Terms with support inside the given site set.
  Interaction restricted_to(const std::vector<std::size_t>& sites) const;

 private:
  std::shared_ptr<const Lattice> lattice_;
  int orbitals_;
  std::map<std::vector<std::size_t>, LocalOperator> terms_;
};

/// Parameters of the example Hamiltonian
///   Σ a*_x T(x−y) a_y + Σ a*_x φ(x) a_x + Σ n_x W(d(x,y)) n_y − μ N.
struct ModelParams {
  int orbitals = 1;
  /// T by displacement; T(−x) = T(x)† is filled in when only one side is given.
  std::map<Site, Matrix> hopping;
  Matrix onsite_uniform;     // r×r Hermitian, empty = 0
  Matrix onsite_staggered;   // multiplied by (−1)^{x_1 + x_2}
  std::map<Site, Matrix> onsite_site;
  /// W by lattice distance.
  std::map<int, Matrix> density;
  double mu = 0.0;

  /// φ(x) assembled from the three on-site contributions.
  Matrix onsite_at(const Site& s) const;
  /// Completes missing T(−x) entries and validates T(−x) = T(x)†.
  void complete_hopping();
};

Interaction build_example_hamiltonian(std::shared_ptr<const Lattice> lattice, ModelParams params);

LocalOperator assemble_operator(const Interaction& phi, const FockSpace& space);

/// Operator norms of each term, keyed like Interaction::terms().
std::map<std::vector<std::size_t>, double> term_norms(const Interaction& phi);

/// ‖Φ‖_{a,n} over a finite family of boxes, with diam({x}) = 0 and 0⁰ = 1.
double interaction_norm(const std::vector<Interaction>& family, double a, int n);
double interaction_norm(const Interaction& phi, double a, int n);

/// ‖Φ‖_{a,n,Λ_M} with ℓ¹ distance and diameter, terms restricted to Λ_M.
double bulk_interaction_norm(const Interaction& phi, double a, int n, int sub_box_radius);

/// On-site potential v: Λ → ℝ, indexed by site.
struct LipschitzPotential {
  std::shared_ptr<const Lattice> lattice;
  std::vector<double> values;

  static LipschitzPotential linear(std::shared_ptr<const Lattice> lattice, double slope);
  static LipschitzPotential sine(std::shared_ptr<const Lattice> lattice, double amplitude);

  /// V_v = Σ v(x) a*_x a_x as an interaction of single-site terms.
  Interaction to_interaction(int orbitals) const;
};

/// C_v with the lattice metric d^Λ.
double lipschitz_constant(const LipschitzPotential& v);
/// C_v° with the ℓ¹ metric.
double lipschitz_constant_l1(const LipschitzPotential& v);

/// Empty when C_v is within bound; otherwise a warning naming the offending pair.
std::string lipschitz_warning(const LipschitzPotential& v, double bound);

struct TdlRow {
  int k = 0;
  int M = 0;
  double value = 0.0;
};

/// ‖Ψ − Φ^{Λ_k}‖_{a,n,Λ_M} for every family member with k >= M. Supports are
/// matched by coordinates, so Ψ may live on a larger box than each Φ^{Λ_k}.
std::vector<TdlRow> tdl_diagnostic(const std::vector<Interaction>& family, const Interaction& reference,
                                   double a, int n, const std::vector<int>& m_values);

/// Σ_c f_c(t) Φ_c for H₀ and V, with H^ε(t) = H₀(t) + εV(t).
class TimeDependentHamiltonian {
 public:
  struct Component {
    Switching profile;
    Interaction interaction;
  };

  TimeDependentHamiltonian(FockSpace space, std::vector<Component> h0, std::vector<Component> v);

  const FockSpace& space() const noexcept { return space_; }
  const std::vector<Component>& h0_components() const noexcept { return h0_; }
  const std::vector<Component>& v_components() const noexcept { return v_; }
  const Matrix& h0_matrix(std::size_t c) const { return h0_mats_.at(c); }
  const Matrix& v_matrix(std::size_t c) const { return v_mats_.at(c); }

  /// d^order/dt^order H₀(t); order in {0,1,2}.
  Matrix h0(double t, int order = 0) const;
  Matrix v(double t, int order = 0) const;
  Matrix h_eps(double t, double eps) const { return h0(t) + eps * v(t); }

  /// True when every profile has vanishing first and second derivative at t.
  bool stationary_at(double t) const;

  /// True when every profile is exactly constant on [a, b].
  bool constant_on(double a, double b) const;
  /// Sorted ramp endpoints of all profiles.
  std::vector<double> breakpoints() const;

 private:
  FockSpace space_;
  std::vector<Component> h0_;
  std::vector<Component> v_;
  std::vector<Matrix> h0_mats_;
  std::vector<Matrix> v_mats_;
};

}  // namespace neass
