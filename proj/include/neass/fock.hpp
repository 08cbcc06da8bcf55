#pragma once

#include "neass/core.hpp"
#include "neass/lattice.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <utility>
#include <vector>

namespace neass {

/// Fermionic Fock space over ℓ²(X, ℂ^r) for a site set X of a lattice.
///
/// Modes are the pairs (site, orbital) ordered by global site index first and
/// orbital second. Basis state b has bit m set iff mode m is occupied, and is
/// identified with a*_{m_1} ... a*_{m_p} |0> for m_1 < ... < m_p.
class FockSpace {
 public:
  FockSpace(std::shared_ptr<const Lattice> lattice, int orbitals, std::vector<std::size_t> sites,
            FockCap cap = {});

  /// Fock space over every site of the lattice.
  static FockSpace full(std::shared_ptr<const Lattice> lattice, int orbitals, FockCap cap = {});

  const Lattice& lattice() const noexcept { return *lattice_; }
  const std::shared_ptr<const Lattice>& lattice_ptr() const noexcept { return lattice_; }
  int orbitals() const noexcept { return orbitals_; }
  const std::vector<std::size_t>& sites() const noexcept { return sites_; }
  int modes() const noexcept { return static_cast<int>(sites_.size()) * orbitals_; }
  Eigen::Index dim() const noexcept { return Eigen::Index{1} << modes(); }

  bool contains_site(std::size_t site) const noexcept;
  bool contains(const FockSpace& other) const noexcept;
  bool same_as(const FockSpace& other) const noexcept;

  /// Mode index of (global site index, orbital); throws ModeOutOfRange.
  int mode(std::size_t site, int orbital) const;

  /// Diagonal of the number operator N_X.
  std::vector<int> particle_numbers() const;
  Matrix number_operator() const;
  Matrix parity_operator() const;
  Matrix identity() const;

  /// Basis indices grouped by particle number (0..modes).
  std::vector<std::vector<Eigen::Index>> number_sectors() const;

 private:
  std::shared_ptr<const Lattice> lattice_;
  int orbitals_;
  std::vector<std::size_t> sites_;  // sorted, unique
};

struct OperatorFlags {
  bool self_adjoint = false;
  bool even = false;
  bool number_conserving = false;
};

/// A dense operator on the Fock space of its support.
class LocalOperator {
 public:
  LocalOperator(FockSpace space, Matrix matrix);

  const FockSpace& space() const noexcept { return space_; }
  const std::vector<std::size_t>& support() const noexcept { return space_.sites(); }
  const Matrix& matrix() const noexcept { return matrix_; }
  const OperatorFlags& flags() const noexcept { return flags_; }

  LocalOperator adjoint() const;

 private:
  FockSpace space_;
  Matrix matrix_;
  OperatorFlags flags_;
};

OperatorFlags classify(const FockSpace& space, const Matrix& m, double tol = 1e-12);

/// a*_{site,i} on F with the Jordan-Wigner string over lower modes.
LocalOperator creation_op(const FockSpace& space, std::size_t site, int orbital);
LocalOperator annihilation_op(const FockSpace& space, std::size_t site, int orbital);

/// Raw matrices of all annihilators, indexed by mode.
std::vector<Matrix> annihilators(const FockSpace& space);

/// Natural inclusion 𝒜_X ⊂ 𝒜_X' for even operators.
LocalOperator embed_local(const LocalOperator& op, const FockSpace& big);

/// Normalized partial trace of an even operator onto the sites of `sub`,
/// returned as an operator on `sub`.
LocalOperator reduce_to(const LocalOperator& op, const FockSpace& sub);

/// E_{Λ_l}[A] = embed(reduce(A)) as an operator on A's space.
LocalOperator conditional_expectation(const LocalOperator& op, const std::vector<std::size_t>& keep);
LocalOperator conditional_expectation(const LocalOperator& op, int sub_box_radius);

/// (l, ‖A − E_{Λ_l}[A]‖) for each requested radius.
std::vector<std::pair<int, double>> locality_profile(const LocalOperator& op,
                                                     const std::vector<int>& l_values);

/// Uniformly random even operator (complex Gaussian entries on parity-preserving
/// blocks), optionally made Hermitian. Normalized to unit operator norm.
Matrix random_even_matrix(const FockSpace& space, std::mt19937_64& rng, bool hermitian);

/// Random even operator on `window` consecutive sites of `big`, embedded into `big`.
Matrix random_local_even_matrix(const FockSpace& big, std::size_t window, std::mt19937_64& rng);

}  // namespace neass
