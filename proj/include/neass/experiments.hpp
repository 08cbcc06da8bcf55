#pragma once

#include "neass/config.hpp"
#include "neass/csv.hpp"
#include "neass/dynamics.hpp"
#include "neass/interactions.hpp"
#include "neass/neass.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace neass {

/// H₀ family member at radius k plus the configured perturbation.
struct Model {
  std::shared_ptr<const Lattice> lattice;
  FockSpace space;
  TimeDependentHamiltonian h;
};

Model build_model(const ExperimentSetup& setup, int k);

/// Matrix of an observable on the full Fock space; throws SiteOutOfRange.
Matrix observable_matrix(const ObservableSpec& obs, const FockSpace& space);
std::size_t observable_support(const ObservableSpec& obs);

struct DefectRecord {
  int k = 0;
  int n = 0;
  double eps = 0.0;
  double eta = 0.0;
  double t0 = 0.0;
  double t = 0.0;
  std::string observable;
  std::int64_t support = 0;
  double defect = 0.0;
  bool eps_dominated = false;
  bool eta_dominated = false;
  std::uint64_t seed = 0;
  int orientation = 1;
  std::int64_t steps = 0;
  double unitarity_defect = 0.0;
  double max_residual_ratio = 0.0;
  double stencil_drift = 0.0;
  std::string error;
};

/// Every (n, ε, η) grid point: NEASS at t₀ and t, propagate, record |Π_{t₀}(𝔘[A]) − Π_t(A)|.
/// Failures are recorded per point and the sweep continues.
std::vector<DefectRecord> run_defect_sweep(const ExperimentSetup& setup, std::uint64_t seed, unsigned threads);
Table defect_table(const std::vector<DefectRecord>& records);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms of log residuals
  std::size_t used = 0;
  std::size_t excluded = 0;
};

/// Least squares on (log x, log y). Points with y ≤ floor are excluded and
/// counted; FloorContamination when that leaves fewer than four points,
/// DynamicRangeTooSmall for fewer than four points or less than `min_decades` in x.
SlopeFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y,
                          double floor = 10.0 * std::numeric_limits<double>::epsilon(), double min_decades = 1.0);

struct ScalingCheck {
  int n = 0;
  std::string observable;
  std::string axis;
  double expected = 0.0;
  double tolerance = 0.0;
  SlopeFit fit;
  bool pass = false;
  std::string note;
};

/// Slope per (n, observable) along the swept axis, restricted to the regime
/// where the corresponding term of the two-term bound dominates.
std::vector<ScalingCheck> check_defect_scaling(const ExperimentSetup& setup, const std::vector<DefectRecord>& records);
Table scaling_table(const std::vector<ScalingCheck>& checks);

struct LifetimeRecord {
  int n = 0;
  double eps = 0.0;
  double s = 0.0;
  std::string observable;
  double drift = 0.0;
};

/// drift(ε, s) = |Π(e^{isℒ_{H^ε}}[A]) − Π(A)| with the μ = 0 generator at time t.
std::vector<LifetimeRecord> lifetime_experiment(const ExperimentSetup& setup, std::uint64_t seed, unsigned threads);
Table lifetime_table(const std::vector<LifetimeRecord>& records);

struct LifetimeCheck {
  int n = 0;
  std::string observable;
  SlopeFit eps_fit;
  bool eps_pass = false;
  SlopeFit s_fit;
  bool s_pass = false;
  std::string note;
};

std::vector<LifetimeCheck> check_lifetime(const ExperimentSetup& setup, const std::vector<LifetimeRecord>& records);
Table lifetime_check_table(const std::vector<LifetimeCheck>& checks);

struct TdlRecord {
  int k = 0;
  std::string observable;
  std::string quantity;  // ground | neass | evolved
  double value = 0.0;
  double difference = 0.0;
  std::int64_t boundary_distance = 0;
};

std::vector<TdlRecord> tdl_convergence_experiment(const ExperimentSetup& setup, std::uint64_t seed, unsigned threads);
Table tdl_table(const std::vector<TdlRecord>& records);
/// Ground-state differences must not increase with k.
bool tdl_monotone(const std::vector<TdlRecord>& records);

/// Interaction norms, bulk norms, TDL diagnostics and Lipschitz constants.
Table norms_table(const ExperimentSetup& setup);

struct ModelCheck {
  Table gaps;
  Table summary;
  bool uniform_gap = false;
  bool bulk_gap = false;
  bool pass = false;
};

ModelCheck model_check(const ExperimentSetup& setup, unsigned threads);

struct BuildReport {
  Table residuals;
  std::vector<NeassGenerator> generators;
  bool pass = false;
};

BuildReport neass_build(const ExperimentSetup& setup, std::uint64_t seed, unsigned threads);

}  // namespace neass
