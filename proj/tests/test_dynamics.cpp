#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "neass/dynamics.hpp"
#include "neass/spectral.hpp"
#include "oracles.hpp"

#include <memory>

using namespace neass;

namespace {

Matrix scalar(double x) { return Matrix::Constant(1, 1, x); }

struct Fixture {
  std::shared_ptr<const Lattice> lattice;
  FockSpace space;
  Matrix h;  // hopping chain
  Matrix n;  // number operator
};

Fixture fixture(int k) {
  auto lat = std::make_shared<const Lattice>(1, k, Boundary::Open);
  FockSpace f = FockSpace::full(lat, 1);
  ModelParams p;
  p.hopping[{1, 0}] = scalar(-1.0);
  p.onsite_staggered = scalar(0.6);
  p.density[1] = scalar(0.3);
  Matrix h = assemble_operator(build_example_hamiltonian(lat, p), f).matrix();
  Matrix n = f.number_operator();
  return {lat, f, h, n};
}

TimeDependentHamiltonian scaled_family(const Fixture& fx, Switching profile) {
  ModelParams p;
  p.hopping[{1, 0}] = scalar(-1.0);
  p.onsite_staggered = scalar(0.6);
  p.density[1] = scalar(0.3);
  return TimeDependentHamiltonian(fx.space, {{profile, build_example_hamiltonian(fx.lattice, p)}}, {});
}

StepControl tight() {
  StepControl c;
  c.tolerance = 1e-12;
  return c;
}

}  // namespace

TEST_CASE("time-independent Hamiltonian") {
  const Fixture fx = fixture(2);
  const TimeDependentHamiltonian h = scaled_family(fx, switching::Constant{1.0});
  const Propagator p = propagate(h, 0.0, 0.0, 1.3, 0.1);
  CHECK(max_abs(p.U - oracle::unitary_exp(fx.h, 1.3 / 0.1)) <= 1e-8);
  CHECK(p.stats.exact_pieces == 1);
  CHECK(p.stats.unitarity_defect <= 1e-8);
  const Propagator same = propagate(h, 0.0, 0.4, 0.4, 0.1);
  CHECK(max_abs(same.U - fx.space.identity()) == 0.0);
}

TEST_CASE("commuting families match the exact exponential") {
  const Fixture fx = fixture(2);
  SUBCASE("linear profile") {
    const TimeDependentHamiltonian h = scaled_family(fx, switching::Linear{0.8, 1.0});
    const double t0 = 0.0, t = 1.0, eta = 0.2;
    const double integral = oracle::integrate([](double s) { return 0.8 * s + 1.0; }, t0, t);
    const Propagator p = propagate(h, 0.0, t0, t, eta, tight());
    CHECK(max_abs(p.U - oracle::unitary_exp(fx.h, integral / eta)) <= 1e-8);
    CHECK(p.stats.unitarity_defect <= 1e-8);
  }
  SUBCASE("smooth ramp") {
    const switching::Ramp r{0.2, 0.9, 0.5, 1.5};
    const TimeDependentHamiltonian h = scaled_family(fx, r);
    const double integral =
        oracle::integrate([&](double s) { return evaluate(Switching{r}, s); }, 0.0, 1.2, 2000);
    const Propagator p = propagate(h, 0.0, 0.0, 1.2, 0.25, tight());
    CHECK(max_abs(p.U - oracle::unitary_exp(fx.h, integral / 0.25)) <= 1e-8);
    CHECK(p.stats.exact_pieces == 2);
  }
  SUBCASE("number operator drive on top of a static Hamiltonian") {
    ModelParams p;
    p.hopping[{1, 0}] = scalar(-1.0);
    p.onsite_staggered = scalar(0.6);
    p.density[1] = scalar(0.3);
    ModelParams chem;
    chem.mu = -1.0;  // + N
    const switching::Sine s{0.7, 3.0, 0.2};
    const TimeDependentHamiltonian h(fx.space,
                                     {{switching::Constant{1.0}, build_example_hamiltonian(fx.lattice, p)},
                                      {s, build_example_hamiltonian(fx.lattice, chem)}},
                                     {});
    const double t = 1.1, eta = 0.3;
    const double phase = oracle::integrate([&](double x) { return evaluate(Switching{s}, x); }, 0.0, t);
    const Propagator prop = propagate(h, 0.0, 0.0, t, eta, tight());
    const Matrix exact = oracle::unitary_exp(fx.h, t / eta) * oracle::unitary_exp(fx.n, phase / eta);
    CHECK(max_abs(prop.U - exact) <= 1e-8);
  }
}

TEST_CASE("fourth-order convergence on a fixed grid") {
  const Fixture fx = fixture(1);
  const switching::Sine s{1.0, 2.0, 0.3};
  const TimeDependentHamiltonian h = scaled_family(fx, s);
  const double t = 1.0, eta = 0.5;
  const double integral = oracle::integrate([&](double x) { return evaluate(Switching{s}, x); }, 0.0, t);
  const Matrix exact = oracle::unitary_exp(fx.h, integral / eta);
  std::vector<double> err;
  for (std::size_t n : {2u, 4u, 8u}) {
    StepControl c;
    c.tolerance = 1e300;  // accept the first doubling: 2n steps
    c.steps_per_phase = 0.0;
    c.min_steps = n;
    err.push_back(max_abs(propagate(h, 0.0, 0.0, t, eta, c).U - exact));
  }
  for (std::size_t i = 1; i < err.size(); ++i) CHECK(err[i - 1] / err[i] == doctest::Approx(16.0).epsilon(0.3));
}

TEST_CASE("non-commuting drive is fourth order too") {
  Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = -1.0;
  b(0, 1) = b(1, 0) = 1.0;
  DriveSpec d;
  d.hamiltonian = [&](double t) { return Matrix(a + std::sin(2.0 * t) * b); };
  auto run = [&](std::size_t n) {
    StepControl c;
    c.tolerance = 1e300;
    c.steps_per_phase = 0.0;
    c.min_steps = n;
    return propagate(d, 0.0, 1.0, 0.5, c).U;
  };
  const Matrix ref = run(1024);
  const double e1 = max_abs(run(8) - ref), e2 = max_abs(run(16) - ref);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.3));
}

TEST_CASE("Heisenberg and static evolution") {
  const Fixture fx = fixture(2);
  const TimeDependentHamiltonian h = scaled_family(fx, switching::Sine{0.5, 1.0, 0.0});
  const Propagator p = propagate(h, 0.0, 0.0, 0.8, 0.2, tight());
  CHECK(max_abs(heisenberg_evolve(p, fx.space.identity()) - fx.space.identity()) <= 1e-10);
  std::mt19937_64 rng(5);
  const Vector psi = diagonalize(fx.h).ground_vector();
  for (int i = 0; i < 10; ++i) {
    const Matrix a = oracle::random_matrix(fx.space.dim(), rng);
    const Matrix ua = heisenberg_evolve(p, a);
    CHECK(std::abs(operator_norm(ua) - operator_norm(a)) <= 1e-10 * operator_norm(a));
    const Vector up = p.U * psi;
    CHECK(std::abs(psi.dot(ua * psi) - up.dot(a * up)) <= 1e-10 * operator_norm(a));
  }
  // a static Hamiltonian leaves commuting observables alone
  const Propagator st = propagate(scaled_family(fx, switching::Constant{1.0}), 0.0, 0.0, 2.0, 0.3);
  CHECK(max_abs(heisenberg_evolve(st, fx.n) - fx.n) <= 1e-10);

  const Matrix a = oracle::random_matrix(fx.space.dim(), rng);
  CHECK(max_abs(static_evolve(fx.h, 0.0, a) - a) <= 1e-14);
  CHECK(max_abs(static_evolve(fx.h, 0.7, fx.h) - fx.h) <= 1e-10);
  CHECK(max_abs(static_evolve(fx.h, 0.3, static_evolve(fx.h, 0.4, a)) - static_evolve(fx.h, 0.7, a)) <= 1e-10);
}

TEST_CASE("step cap and bad arguments") {
  const Fixture fx = fixture(2);
  const TimeDependentHamiltonian h = scaled_family(fx, switching::Sine{1.0, 5.0, 0.0});
  StepControl c;
  c.tolerance = 1e-14;
  c.max_steps = 16;
  try {
    propagate(h, 0.0, 0.0, 1.0, 0.01, c);
    FAIL("expected StepLimitExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StepLimitExceeded);
  }
  CHECK_THROWS_AS(propagate(h, 0.0, 0.0, 1.0, 0.0), Error);
}
