#pragma once

#include "neass/core.hpp"
#include "neass/interactions.hpp"
#include "neass/liouvillian.hpp"
#include "neass/series.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace neass {

/// Orientation σ of the dressing β[A] = e^{iσεS} A e^{−iσεS}.
/// +1 is e^{iεℒ_S}, −1 is e^{−iεℒ_S}.
std::string orientation_label(int orientation);

struct GeneratorOptions {
  int order = 1;
  /// μ = η/ε.
  double mu = 0.0;
  /// Central-difference step for Ṡ.
  double dt = 1e-4;
  int orientation = 1;
  double gap_tolerance = 1e-6;
  /// r_j ≤ residual_tolerance · scale_j is required for every order.
  double residual_tolerance = 1e-7;
  std::uint64_t panel_seed = 20240607;
  int panel_size = 20;
  std::size_t panel_window = 2;
  /// Rebuild with dt/2 once and report the relative change of the A_j.
  bool check_stencil = true;
  bool throw_on_residual = true;
};

struct NeassGenerator {
  int order = 0;
  double mu = 0.0;
  double t = 0.0;
  int orientation = 1;
  double dt = 0.0;
  std::uint64_t panel_seed = 0;
  std::vector<Matrix> A;           // A[j-1] = A_j
  std::vector<Matrix> remainders;  // R̃_j, coefficient before cancellation
  std::vector<double> residuals;   // r_j over the random panel
  std::vector<double> scales;      // ‖R̃_j‖
  std::vector<double> offdiag;     // ‖P₀ coeff_j (1−P₀)‖ after cancellation
  double stencil_drift = 0.0;

  /// S = Σ_j ε^{j−1} A_j.
  Matrix S(double eps) const;
};

/// Orders 1..n at fixed inputs. Ȧ_1..Ȧ_{n−1} are supplied by the caller
/// (ignored when μ = 0); missing entries count as zero.
NeassGenerator construct_orders(const LiouvillianContext& ctx, const Matrix& h0, const Matrix& h0_dot,
                                const Matrix& v, const std::vector<Matrix>& a_dot,
                                const GeneratorOptions& options, const std::vector<Matrix>& panel = {});

/// Full construction at time t; Ṡ from central differences of the
/// order-(j−1) construction at t ± dt.
NeassGenerator build_generators(const TimeDependentHamiltonian& h, double t, const GeneratorOptions& options);

/// Random even operators on `window` consecutive sites, embedded into the space.
std::vector<Matrix> residual_panel(const FockSpace& space, std::uint64_t seed, int count, std::size_t window);

struct SignPinResult {
  int orientation = 0;
  double residual_plus = 0.0;
  double residual_minus = 0.0;
  double scale = 0.0;
};

/// First-order cancellation test under both orientations on a random gapped
/// chain. Throws SignConventionUndetermined unless exactly one passes.
SignPinResult pin_sign_convention(std::uint64_t seed);
/// Cached result of pin_sign_convention with a fixed seed.
int pinned_orientation();

struct ResummedGenerator {
  Matrix S;
  int J = 0;
};

/// δ_j = 2^{−j}, j = 1..j_max.
std::vector<double> default_delta_schedule(int j_max);

/// S^{ε,η} = Σ_{j≤J} ε^{j−1} A_j with J the last order whose cutoffs ε ≤ δ_j, η ≤ δ_j are open.
ResummedGenerator resum_generator(const NeassGenerator& gen, double eps, double eta,
                                  const std::vector<double>& delta);

/// W = e^{−iσεS}; β[A] = W† A W.
Matrix dressing_unitary(const Matrix& s, double eps, int orientation);
Matrix apply_dressing(const Matrix& s, double eps, int orientation, const Matrix& a);

/// Π(A) = ρ₀(β[A]) = ⟨Wψ₀|A|Wψ₀⟩.
class NeassState {
 public:
  NeassState(const Vector& ground, const Matrix& s, double eps, int orientation);

  const Vector& dressed() const noexcept { return dressed_; }
  cplx expectation(const Matrix& a) const { return dressed_.dot(a * dressed_); }

 private:
  Vector dressed_;
};

/// d/dε Π^{ε,0}(A) at ε = 0 from the μ = 0, n = 1 generator.
double kubo_coefficient(const LiouvillianContext& ctx, const Matrix& v, const Matrix& a, int orientation);

/// Text container: a header of `key value` lines followed by
/// `matrix <name> <rows> <cols>` blocks of `re im` lines in row-major order.
void write_generator_dump(std::ostream& out, const NeassGenerator& gen);
NeassGenerator read_generator_dump(std::istream& in);

}  // namespace neass
