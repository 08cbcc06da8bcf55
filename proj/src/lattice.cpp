#include "neass/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace neass {

std::string_view to_string(Boundary b) { return b == Boundary::Open ? "open" : "torus"; }

Boundary parse_boundary(std::string_view text) {
  if (text == "open") return Boundary::Open;
  if (text == "torus" || text == "periodic") return Boundary::Torus;
  throw Error(ErrorCode::InvalidArgument, "unknown boundary '" + std::string(text) + "'");
}

Lattice::Lattice(int dimension, int radius, Boundary boundary)
    : dimension_(dimension), radius_(radius), boundary_(boundary) {
  if (dimension != 1 && dimension != 2)
    throw Error(ErrorCode::InvalidArgument, "only d in {1,2} is supported");
  if (radius < 1) throw Error(ErrorCode::InvalidArgument, "radius must be >= 1");

  const int side = 2 * radius + 1;
  if (dimension == 1) {
    for (int x = -radius; x <= radius; ++x) sites_.push_back({x, 0});
  } else {
    for (int x = -radius; x <= radius; ++x)
      for (int y = -radius; y <= radius; ++y) sites_.push_back({x, y});
  }

  const std::size_t n = sites_.size();
  metric_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      int d = 0;
      for (int c = 0; c < dimension; ++c) {
        int delta = std::abs(sites_[i][c] - sites_[j][c]);
        if (boundary == Boundary::Torus) delta = std::min(delta, side - delta);
        d += delta;
      }
      metric_[i * n + j] = d;
    }
  }
}

const Site& Lattice::site(std::size_t index) const {
  if (index >= sites_.size())
    throw Error(ErrorCode::SiteOutOfRange, "site index " + std::to_string(index));
  return sites_[index];
}

bool Lattice::contains(const Site& s) const noexcept {
  for (int c = 0; c < 2; ++c) {
    if (c < dimension_) {
      if (s[c] < -radius_ || s[c] > radius_) return false;
    } else if (s[c] != 0) {
      return false;
    }
  }
  return true;
}

std::size_t Lattice::index_of(const Site& s) const {
  if (!contains(s))
    throw Error(ErrorCode::SiteOutOfRange, "site " + format_site(s, dimension_) +
                                               " outside box of radius " + std::to_string(radius_));
  const int side = 2 * radius_ + 1;
  if (dimension_ == 1) return static_cast<std::size_t>(s[0] + radius_);
  return static_cast<std::size_t>((s[0] + radius_) * side + (s[1] + radius_));
}

int Lattice::distance(std::size_t x, std::size_t y) const {
  const std::size_t n = sites_.size();
  if (x >= n || y >= n) throw Error(ErrorCode::SiteOutOfRange, "distance query");
  return metric_[x * n + y];
}

int Lattice::l1_distance(std::size_t x, std::size_t y) const {
  const Site& a = site(x);
  const Site& b = site(y);
  return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]);
}

Site Lattice::displacement(std::size_t x, std::size_t y) const {
  const Site& a = site(x);
  const Site& b = site(y);
  const int side = 2 * radius_ + 1;
  Site d{0, 0};
  for (int c = 0; c < dimension_; ++c) {
    int delta = a[c] - b[c];
    if (boundary_ == Boundary::Torus) {
      while (delta > radius_) delta -= side;
      while (delta < -radius_) delta += side;
    }
    d[c] = delta;
  }
  return d;
}

std::vector<std::size_t> Lattice::sub_box(int l) const {
  if (l < 0 || l > radius_)
    throw Error(ErrorCode::SubBoxTooLarge,
                "sub-box radius " + std::to_string(l) + " exceeds " + std::to_string(radius_));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    bool inside = true;
    for (int c = 0; c < dimension_; ++c) inside = inside && std::abs(sites_[i][c]) <= l;
    if (inside) out.push_back(i);
  }
  return out;
}

int Lattice::l1_diameter(const std::vector<std::size_t>& set) const {
  int d = 0;
  for (std::size_t a = 0; a < set.size(); ++a)
    for (std::size_t b = a + 1; b < set.size(); ++b) d = std::max(d, l1_distance(set[a], set[b]));
  return d;
}

int Lattice::diameter(const std::vector<std::size_t>& set) const {
  int d = 0;
  for (std::size_t a = 0; a < set.size(); ++a)
    for (std::size_t b = a + 1; b < set.size(); ++b) d = std::max(d, distance(set[a], set[b]));
  return d;
}

void Lattice::override_metric(std::vector<int> table) {
  if (table.size() != metric_.size())
    throw Error(ErrorCode::ShapeMismatch, "metric table has wrong size");
  metric_ = std::move(table);
}

Lattice build_lattice(int dimension, int radius, Boundary boundary, int orbitals, FockCap cap) {
  if (dimension != 1 && dimension != 2)
    throw Error(ErrorCode::InvalidArgument, "only d in {1,2} is supported");
  if (radius < 1) throw Error(ErrorCode::InvalidArgument, "radius must be >= 1");
  if (orbitals < 1) throw Error(ErrorCode::InvalidArgument, "orbitals must be >= 1");
  std::size_t sites = 1;
  for (int c = 0; c < dimension; ++c) sites *= static_cast<std::size_t>(2 * radius + 1);
  const std::size_t modes = sites * static_cast<std::size_t>(orbitals);
  if (modes > cap.max_modes)
    throw Error(ErrorCode::DimensionTooLarge, std::to_string(modes) + " modes exceed cap of " +
                                                  std::to_string(cap.max_modes));
  return Lattice(dimension, radius, boundary);
}

int metric_distance(const Lattice& lattice, const Site& x, const Site& y) {
  return lattice.distance(lattice.index_of(x), lattice.index_of(y));
}

BulkCompatibilityReport check_bulk_compatibility(const Lattice& lattice) {
  BulkCompatibilityReport report;
  const std::size_t n = lattice.size();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const int d = lattice.distance(x, y);
      const int l1 = lattice.l1_distance(x, y);
      const bool ok = d <= l1 && (l1 > lattice.radius() || d == l1);
      if (!ok) report.violations.emplace_back(x, y);
    }
  }
  report.compatible = report.violations.empty();
  return report;
}

std::string format_site(const Site& s, int dimension) {
  std::ostringstream os;
  if (dimension == 1) {
    os << s[0];
  } else {
    os << '(' << s[0] << ',' << s[1] << ')';
  }
  return os.str();
}

}  // namespace neass
