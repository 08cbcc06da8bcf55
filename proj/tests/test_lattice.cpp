#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "neass/lattice.hpp"

#include <cstdlib>

using namespace neass;

TEST_CASE("box sizes and open metric") {
  const Lattice l1(1, 1, Boundary::Open);
  CHECK(l1.size() == 3);
  CHECK(metric_distance(l1, {-1, 0}, {1, 0}) == 2);
  const Lattice l2(2, 1, Boundary::Open);
  CHECK(l2.size() == 9);
  CHECK(metric_distance(l2, {-1, -1}, {1, 1}) == 4);
  const Lattice l3(1, 3, Boundary::Open);
  CHECK(metric_distance(l3, {-3, 0}, {3, 0}) == 6);
  CHECK(metric_distance(l3, {2, 0}, {2, 0}) == 0);
}

TEST_CASE("torus metric matches brute-force wrapped displacement") {
  for (int k = 1; k <= 3; ++k) {
    const Lattice lat(1, k, Boundary::Torus);
    const int side = 2 * k + 1;
    for (int x = -k; x <= k; ++x)
      for (int y = -k; y <= k; ++y) {
        int best = side;
        for (int w = -2; w <= 2; ++w) best = std::min(best, std::abs(x - y + w * side));
        CHECK(metric_distance(lat, {x, 0}, {y, 0}) == best);
      }
  }
  const Lattice t2(1, 2, Boundary::Torus);
  CHECK(metric_distance(t2, {-2, 0}, {2, 0}) == 1);
  CHECK(metric_distance(t2, {-1, 0}, {1, 0}) == 2);
  const Lattice t3(1, 3, Boundary::Torus);
  CHECK(metric_distance(t3, {-3, 0}, {3, 0}) == 1);
}

TEST_CASE("metric axioms, torus below open, bulk compatibility") {
  for (int d = 1; d <= 2; ++d)
    for (int k = 1; k <= (d == 1 ? 6 : 2); ++k) {
      const Lattice open(d, k, Boundary::Open), torus(d, k, Boundary::Torus);
      const std::size_t n = open.size();
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
          for (const Lattice* l : {&open, &torus}) {
            CHECK(l->distance(x, y) == l->distance(y, x));
            CHECK((l->distance(x, y) == 0) == (x == y));
            for (std::size_t z = 0; z < n; ++z) CHECK(l->distance(x, z) <= l->distance(x, y) + l->distance(y, z));
          }
          CHECK(torus.distance(x, y) <= open.distance(x, y));
          CHECK(open.distance(x, y) == open.l1_distance(x, y));
        }
      CHECK(check_bulk_compatibility(open).compatible);
      CHECK(check_bulk_compatibility(torus).compatible);
    }
}

TEST_CASE("corrupted metric is reported") {
  Lattice lat(1, 2, Boundary::Open);
  std::vector<int> table(lat.size() * lat.size());
  for (std::size_t x = 0; x < lat.size(); ++x)
    for (std::size_t y = 0; y < lat.size(); ++y) table[x * lat.size() + y] = lat.distance(x, y);
  table[0 * lat.size() + 1] = table[1 * lat.size() + 0] = 3;  // sites -2, -1 now further apart than l1
  lat.override_metric(table);
  const auto report = check_bulk_compatibility(lat);
  CHECK_FALSE(report.compatible);
  REQUIRE_FALSE(report.violations.empty());
  CHECK(report.violations.front().first <= 1);
  CHECK(report.violations.front().second <= 1);
}

TEST_CASE("sub-boxes, diameters and errors") {
  const Lattice lat(2, 2, Boundary::Open);
  CHECK(lat.sub_box(0).size() == 1);
  CHECK(lat.sub_box(1).size() == 9);
  CHECK(lat.sub_box(2).size() == 25);
  CHECK(lat.l1_diameter({lat.index_of({-2, -2}), lat.index_of({2, 2})}) == 8);
  CHECK(lat.l1_diameter({lat.index_of({0, 0})}) == 0);
  CHECK_THROWS_AS(lat.index_of({3, 0}), Error);
  CHECK_THROWS_AS(Lattice(3, 1, Boundary::Open), Error);
  CHECK(parse_boundary("torus") == Boundary::Torus);
  CHECK_THROWS_AS(parse_boundary("mobius"), Error);
}

TEST_CASE("Fock cap is enforced when building lattices") {
  CHECK_NOTHROW(build_lattice(1, 5, Boundary::Open, 1));
  try {
    build_lattice(1, 4, Boundary::Open, 2);  // 18 modes
    FAIL("expected DimensionTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionTooLarge);
  }
}
