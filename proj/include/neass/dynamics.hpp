#pragma once

#include "neass/core.hpp"
#include "neass/interactions.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace neass {

struct StepControl {
  /// Relative agreement of ⟨ψ|U|ψ⟩ between N and 2N steps.
  double tolerance = 1e-7;
  double unitarity_tolerance = 1e-8;
  /// Steps per unit of |t − t₀|·‖H‖/η on the first attempt.
  double steps_per_phase = 0.5;
  std::size_t min_steps = 4;
  std::size_t max_steps = std::size_t{1} << 20;
};

struct PropagatorStats {
  std::size_t steps = 0;          // accepted fine-grid steps over all varying pieces
  std::size_t exact_pieces = 0;   // pieces handled by one exact exponential
  double unitarity_defect = 0.0;  // max |U†U − 1|
  double self_consistency = 0.0;  // worst relative N vs 2N mismatch
};

/// U(t, t₀) solving iη ∂_t U = H(t) U.
struct Propagator {
  Matrix U;
  double t0 = 0.0;
  double t = 0.0;
  double eta = 0.0;
  PropagatorStats stats;
};

/// Description of a time-dependent generator for the integrator.
struct DriveSpec {
  std::function<Matrix(double)> hamiltonian;
  /// Exactly constant on [a, b]; enables single-exponential pieces.
  std::function<bool(double, double)> constant_on;
  std::vector<double> breakpoints;
  /// Invariant index blocks of every H(t); empty means one block.
  std::vector<std::vector<Eigen::Index>> blocks;
  /// Optional fast path returning H(t) already restricted to each block.
  std::function<std::vector<Matrix>(double)> block_hamiltonian;
  /// Vector for the self-consistency check; empty means ground state of H(t₀).
  Vector reference;
};

/// Fourth-order commutator-free integrator with adaptive step doubling.
/// Throws StepLimitExceeded or UnitarityLost.
Propagator propagate(const DriveSpec& drive, double t0, double t, double eta, const StepControl& control = {});

/// H^ε(t) = H₀(t) + εV(t), blocked by particle number.
/// `reference` feeds the self-consistency check (ground state of H^ε(t₀) when empty).
Propagator propagate(const TimeDependentHamiltonian& h, double eps, double t0, double t, double eta,
                     const StepControl& control = {}, const Vector& reference = Vector());

/// U† A U.
Matrix heisenberg_evolve(const Propagator& p, const Matrix& a);

/// e^{isH} A e^{−isH}.
Matrix static_evolve(const Matrix& h, double s, const Matrix& a);

}  // namespace neass
