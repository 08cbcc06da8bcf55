#pragma once

#include "neass/core.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace neass {

enum class Boundary { Open, Torus };

std::string_view to_string(Boundary b);
Boundary parse_boundary(std::string_view text);

/// A lattice point; unused trailing coordinates are zero.
using Site = std::array<int, 2>;

/// Fock-space size guard shared by every module that builds dense operators.
/// The default admits 12 modes (dim 4096).
struct FockCap {
  std::size_t max_modes = 12;
};

/// Centered box {-k..k}^d with open or periodic metric. Site indices follow the
/// lexicographic order of coordinates and fix the Jordan-Wigner mode order.
class Lattice {
 public:
  Lattice(int dimension, int radius, Boundary boundary);

  int dimension() const noexcept { return dimension_; }
  int radius() const noexcept { return radius_; }
  Boundary boundary() const noexcept { return boundary_; }
  std::size_t size() const noexcept { return sites_.size(); }
  const std::vector<Site>& sites() const noexcept { return sites_; }
  const Site& site(std::size_t index) const;

  /// Index of a coordinate tuple; throws SiteOutOfRange.
  std::size_t index_of(const Site& s) const;
  bool contains(const Site& s) const noexcept;

  /// d^{Λ_k}(x, y) by site index.
  int distance(std::size_t x, std::size_t y) const;
  /// Plain ℓ¹ distance of the embedded coordinates.
  int l1_distance(std::size_t x, std::size_t y) const;

  /// Displacement x - y reduced modulo the boundary (torus wraps each coordinate into {-k..k}).
  Site displacement(std::size_t x, std::size_t y) const;

  /// Indices of the centered sub-box Λ_l, l <= k.
  std::vector<std::size_t> sub_box(int l) const;

  /// ℓ¹ diameter of a site set; 0 for singletons and the empty set.
  int l1_diameter(const std::vector<std::size_t>& sites) const;
  int diameter(const std::vector<std::size_t>& sites) const;

  /// Replace the metric table; only used to build corrupted fixtures for the
  /// bulk-compatibility checker.
  void override_metric(std::vector<int> table);

 private:
  int dimension_;
  int radius_;
  Boundary boundary_;
  std::vector<Site> sites_;
  std::vector<int> metric_;  // size()^2, row-major
};

Lattice build_lattice(int dimension, int radius, Boundary boundary, int orbitals = 1,
                      FockCap cap = {});

int metric_distance(const Lattice& lattice, const Site& x, const Site& y);

struct BulkCompatibilityReport {
  bool compatible = true;
  /// Pairs (x, y) by site index violating d^Λ <= ℓ¹ or equality below radius.
  std::vector<std::pair<std::size_t, std::size_t>> violations;
};

BulkCompatibilityReport check_bulk_compatibility(const Lattice& lattice);

std::string format_site(const Site& s, int dimension);

}  // namespace neass
