#pragma once

#include "neass/core.hpp"
#include "neass/lattice.hpp"
#include "neass/spectral.hpp"
#include "neass/switching.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace neass {

/// One `key [args...] = value` line.
struct ConfigEntry {
  std::string key;
  std::vector<std::string> args;
  std::string value;
  int line = 0;
};

struct ConfigSection {
  std::string name;
  int line = 0;
  std::vector<ConfigEntry> entries;

  const ConfigEntry* find(std::string_view key) const;
};

/// Sectioned key-value text:
///
///   # comment
///   [section]
///   key = value
///   key arg1 arg2 = value
///
/// Errors are ConfigError with `source:line:` prefixes.
class Config {
 public:
  static Config parse(std::string_view text, std::string source = "<config>");
  static Config load(const std::string& path);

  const std::string& source() const noexcept { return source_; }
  const std::vector<ConfigSection>& sections() const noexcept { return sections_; }
  const ConfigSection* section(std::string_view name) const;
  std::vector<const ConfigSection*> sections_with_prefix(std::string_view prefix) const;

  /// Whitespace- and comment-free rendering used for run hashes.
  std::string canonical() const;

  [[noreturn]] void fail(int line, const std::string& message) const;

  double get_double(std::string_view section, std::string_view key, double fallback) const;
  int get_int(std::string_view section, std::string_view key, int fallback) const;
  std::string get_string(std::string_view section, std::string_view key, std::string fallback) const;
  std::vector<double> get_doubles(std::string_view section, std::string_view key,
                                  std::vector<double> fallback) const;
  std::vector<int> get_ints(std::string_view section, std::string_view key, std::vector<int> fallback) const;

  double to_double(const ConfigEntry& e, std::string_view text) const;
  int to_int(const ConfigEntry& e, std::string_view text) const;
  std::vector<double> to_doubles(const ConfigEntry& e) const;
  Matrix to_matrix(const ConfigEntry& e) const;
  Switching to_switching(const ConfigEntry& e) const;

 private:
  std::string source_;
  std::vector<ConfigSection> sections_;
};

/// "re", "re+imi", "imi", "-i" and friends.
std::optional<cplx> parse_complex(std::string_view text);
/// Rows separated by ';', entries by ','.
std::optional<Matrix> parse_matrix(std::string_view text);

struct PerturbationSpec {
  std::string kind = "none";  // none | linear | sine
  double strength = 0.0;
  Switching profile = switching::Constant{1.0};
};

struct ObservableSpec {
  std::string name;
  std::string kind;  // density | current | hopping
  std::vector<Site> sites;
  int orbital = 0;
};

struct ExperimentParams {
  std::vector<int> orders{1};
  std::vector<double> eps{0.01};
  std::vector<double> eta{0.01};
  double t0 = 0.0;
  double t = 1.0;
  /// Relative self-consistency target for the propagator.
  double propagation_tolerance = 1e-10;
  std::size_t max_steps = std::size_t{1} << 18;
  double dt = 1e-4;
  std::vector<double> s_grid{1.0, 2.0, 3.0, 4.0, 5.0};
  double s_fit = 5.0;
  std::vector<int> k_list;
  std::vector<double> t_grid{0.0};
  double gap_threshold = 0.05;
  int min_k = 1;
  int interior_l = -1;
  double norm_a = 1.0;
  int norm_n = 2;
  std::vector<int> m_list;
  /// eps | eta | auto (whichever grid has more than one value).
  std::string axis = "auto";
  std::vector<double> delta;
  double regime_factor = 10.0;
};

/// Everything a harness subcommand needs, built from a parsed Config.
struct ExperimentSetup {
  ModelFamily family;
  int radius = 1;
  PerturbationSpec perturbation;
  std::vector<ObservableSpec> observables;
  ExperimentParams params;
  std::string canonical_config;
};

ExperimentSetup load_setup(const Config& config);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace neass
