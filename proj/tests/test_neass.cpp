#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "neass/neass.hpp"
#include "oracles.hpp"

#include <memory>
#include <sstream>

using namespace neass;

namespace {

Matrix scalar(double x) { return Matrix::Constant(1, 1, x); }

Matrix dense_conjugation(const Matrix& s, double eps, int sigma, const Matrix& x) {
  // e^{iσεS} X e^{−iσεS}
  const Matrix w = oracle::unitary_exp(s, sigma * eps);  // e^{−iσεS}
  return w.adjoint() * x * w;
}

struct Chain {
  std::shared_ptr<const Lattice> lattice;
  FockSpace space;
  TimeDependentHamiltonian h;
};

// Gapped open chain; V is the central density unless a potential is given.
Chain chain(int k, Switching v_profile, bool with_drive, bool with_v = true) {
  auto lat = std::make_shared<const Lattice>(1, k, Boundary::Open);
  FockSpace f = FockSpace::full(lat, 1);
  ModelParams p;
  p.hopping[{1, 0}] = scalar(-1.0);
  p.onsite_staggered = scalar(1.0);
  std::vector<TimeDependentHamiltonian::Component> h0{{switching::Constant{1.0}, build_example_hamiltonian(lat, p)}};
  if (with_drive) {
    ModelParams q;
    q.onsite_staggered = scalar(0.5);
    h0.push_back({switching::Ramp{0.0, 1.0, 0.0, 1.0}, build_example_hamiltonian(lat, q)});
  }
  std::vector<TimeDependentHamiltonian::Component> v;
  if (with_v) v.push_back({v_profile, LipschitzPotential::linear(lat, 0.7).to_interaction(1)});
  TimeDependentHamiltonian h(f, h0, v);
  return {lat, f, std::move(h)};
}

}  // namespace

TEST_CASE("operator polynomials") {
  std::mt19937_64 rng(2);
  OperatorPolynomial p(std::vector<Matrix>{oracle::random_matrix(3, rng), oracle::random_matrix(3, rng)});
  OperatorPolynomial q(std::vector<Matrix>{oracle::random_matrix(3, rng), oracle::random_matrix(3, rng)});
  const double e = 0.3;
  CHECK(max_abs((p + q).evaluate(e) - (p.evaluate(e) + q.evaluate(e))) <= 1e-14);
  CHECK(max_abs((p * cplx(0, 2)).evaluate(e) - cplx(0, 2) * p.evaluate(e)) <= 1e-14);
  CHECK(max_abs(p.shifted(1).coeff(1) - p.coeff(0)) == 0.0);
  const auto c = commutator(p, q);
  const Matrix expect1 = p.coeff(0) * q.coeff(1) - q.coeff(1) * p.coeff(0) + p.coeff(1) * q.coeff(0) -
                         q.coeff(0) * p.coeff(1);
  CHECK(max_abs(c.coeff(1) - expect1) <= 1e-13);
  CHECK(p.truncated(4).max_degree() == 4);
  CHECK_THROWS_AS(OperatorPolynomial(3, OperatorPolynomial::kMaxDegree + 1), Error);
}

TEST_CASE("adjoint series") {
  std::mt19937_64 rng(4);
  const Matrix x = oracle::random_hermitian(4, rng);
  const Matrix a1 = oracle::random_hermitian(4, rng), a2 = oracle::random_hermitian(4, rng);

  OperatorPolynomial zero(4, 3), xp(std::vector<Matrix>{x}, 3);
  const auto same = adjoint_series(zero, xp, 3, 1);
  CHECK(max_abs(same.coeff(0) - x) == 0.0);
  for (int j = 1; j <= 3; ++j) CHECK(max_abs(same.coeff(j)) == 0.0);

  OperatorPolynomial es(std::vector<Matrix>{Matrix::Zero(4, 4), a1, a2}, 3);
  for (int sigma : {1, -1}) {
    const auto s1 = adjoint_series(es, xp, 1, sigma);
    CHECK(max_abs(s1.coeff(1) - cplx(0, sigma) * commutator(a1, x)) <= 1e-13);
  }
  CHECK_THROWS_AS(adjoint_series(es, xp, 17, 1), Error);
  CHECK_THROWS_AS(adjoint_series(es, xp, -1, 1), Error);

  // truncation error of order eps^{n+1} against dense conjugation
  for (int n = 1; n <= 3; ++n) {
    std::vector<double> eps, err;
    const std::vector<double> grid = n < 3 ? std::vector<double>{1e-1, 1e-2, 1e-3, 1e-4}
                                           : std::vector<double>{1e-1, 3e-2, 1e-2, 3e-3};
    for (double e : grid) {
      const Matrix s = a1 + e * a2;  // S = A1 + eps A2
      const auto series = adjoint_series(es, xp, n, 1);
      eps.push_back(e);
      err.push_back(max_abs(series.evaluate(e) - dense_conjugation(s, e, 1, x)));
    }
    CHECK(oracle::loglog_slope(eps, err) == doctest::Approx(n + 1).epsilon(0.2 / (n + 1)));
  }
}

TEST_CASE("sign convention is pinned by first-order cancellation") {
  const SignPinResult pin = pin_sign_convention(1);
  CHECK((pin.orientation == 1 || pin.orientation == -1));
  const double good = pin.orientation == 1 ? pin.residual_plus : pin.residual_minus;
  const double bad = pin.orientation == 1 ? pin.residual_minus : pin.residual_plus;
  CHECK(good <= 1e-10 * pin.scale);
  CHECK(bad > 1e-3 * pin.scale);
  CHECK(pinned_orientation() == pin_sign_convention(20240607).orientation);
  CHECK(orientation_label(1) != orientation_label(-1));
}

TEST_CASE("trivial generator when nothing moves") {
  const Chain c = chain(1, switching::Constant{1.0}, false, false);
  GeneratorOptions opt;
  opt.order = 3;
  opt.mu = 0.7;
  opt.orientation = pinned_orientation();
  const NeassGenerator g = build_generators(c.h, 0.3, opt);
  for (const auto& a : g.A) CHECK(max_abs(a) == 0.0);
  CHECK(max_abs(g.S(0.1)) == 0.0);
}

TEST_CASE("first order at mu = 0 is minus the inverse of V") {
  const Chain c = chain(1, switching::Constant{1.0}, false);
  GeneratorOptions opt;
  opt.order = 1;
  opt.orientation = pinned_orientation();
  const NeassGenerator g = build_generators(c.h, 0.0, opt);
  const LiouvillianContext ctx(c.h.h0(0.0));
  CHECK(max_abs(g.A[0] + quasi_local_inverse(ctx, c.h.v(0.0))) <= 1e-12);
}

TEST_CASE("order-by-order stationarity on a 3-site chain") {
  auto lat = std::make_shared<const Lattice>(1, 1, Boundary::Open);
  const FockSpace f = FockSpace::full(lat, 1);
  ModelParams p;
  p.hopping[{1, 0}] = scalar(-1.0);
  p.onsite_staggered = scalar(1.0);
  Interaction centre(lat, 1);
  const FockSpace s(lat, 1, {1});
  centre.add(LocalOperator(s, s.number_operator()));
  const TimeDependentHamiltonian h(f, {{switching::Constant{1.0}, build_example_hamiltonian(lat, p)}},
                                   {{switching::Ramp{0.0, 1.0, 0.0, 1.0}, centre}});
  GeneratorOptions opt;
  opt.order = 2;
  opt.mu = 0.5;
  opt.orientation = pinned_orientation();
  const NeassGenerator g = build_generators(h, 0.4, opt);
  REQUIRE(g.A.size() == 2);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(g.residuals[j] <= 1e-7 * g.scales[j]);
    CHECK(max_abs(g.A[j] - g.A[j].adjoint()) <= 1e-12);
  }
}

TEST_CASE("residual failures are reported") {
  const Chain c = chain(1, switching::Ramp{0.0, 1.0, 0.0, 1.0}, true);
  GeneratorOptions opt;
  opt.order = 2;
  opt.mu = 1.0;
  opt.orientation = -pinned_orientation();  // wrong sign breaks the cancellation
  try {
    build_generators(c.h, 0.5, opt);
    FAIL("expected ResidualTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ResidualTooLarge);
  }
}

TEST_CASE("stationary Hamiltonian gives the mu-independent generator") {
  const Chain c = chain(2, switching::Constant{1.0}, false);
  GeneratorOptions opt;
  opt.order = 3;
  opt.orientation = pinned_orientation();
  opt.mu = 0.0;
  const NeassGenerator g0 = build_generators(c.h, 0.2, opt);
  opt.mu = 2.5;
  const NeassGenerator g1 = build_generators(c.h, 0.2, opt);
  for (std::size_t j = 0; j < g0.A.size(); ++j) CHECK(max_abs(g0.A[j] - g1.A[j]) == 0.0);
}

TEST_CASE("generators are local in time") {
  // The second drive is exactly zero on [0, 1.5], so both Hamiltonians agree to
  // all orders at t = 0.5 while differing later.
  auto lat = std::make_shared<const Lattice>(1, 1, Boundary::Open);
  const FockSpace f = FockSpace::full(lat, 1);
  ModelParams p, q, w;
  p.hopping[{1, 0}] = scalar(-1.0);
  p.onsite_staggered = scalar(1.0);
  q.onsite_staggered = scalar(0.5);
  w.hopping[{1, 0}] = scalar(0.4);
  const Interaction v = LipschitzPotential::linear(lat, 0.5).to_interaction(1);
  std::vector<TimeDependentHamiltonian::Component> base{
      {switching::Constant{1.0}, build_example_hamiltonian(lat, p)},
      {switching::Ramp{0.0, 1.0, 0.0, 1.0}, build_example_hamiltonian(lat, q)}};
  auto extended = base;
  extended.push_back({switching::Ramp{1.5, 2.5, 0.0, 1.0}, build_example_hamiltonian(lat, w)});
  const TimeDependentHamiltonian h1(f, base, {{switching::Ramp{0.0, 1.0, 0.0, 1.0}, v}});
  const TimeDependentHamiltonian h2(f, extended, {{switching::Ramp{0.0, 1.0, 0.0, 1.0}, v},
                                                  {switching::Ramp{2.0, 3.0, 0.0, 1.0}, v}});
  CHECK(max_abs(h1.h0(2.5) - h2.h0(2.5)) > 0.1);
  GeneratorOptions opt;
  opt.order = 3;
  opt.mu = 0.8;
  opt.orientation = pinned_orientation();
  const NeassGenerator g1 = build_generators(h1, 0.5, opt), g2 = build_generators(h2, 0.5, opt);
  for (std::size_t j = 0; j < g1.A.size(); ++j) CHECK(max_abs(g1.A[j] - g2.A[j]) == 0.0);
}

TEST_CASE("resummation cutoffs") {
  const Chain c = chain(1, switching::Ramp{0.0, 1.0, 0.0, 1.0}, true);
  GeneratorOptions opt;
  opt.order = 3;
  opt.mu = 1.0;
  opt.orientation = pinned_orientation();
  const NeassGenerator g = build_generators(c.h, 0.5, opt);
  const auto delta = default_delta_schedule(3);
  CHECK(delta == std::vector<double>{0.5, 0.25, 0.125});
  const auto closed = resum_generator(g, 0.6, 0.6, delta);
  CHECK(closed.J == 0);
  CHECK(max_abs(closed.S) == 0.0);
  const auto open = resum_generator(g, 0.1, 0.1, delta);
  CHECK(open.J == 3);
  CHECK(max_abs(open.S - g.S(0.1)) <= 1e-15);
  CHECK(resum_generator(g, 0.2, 0.1, delta).J == 2);
  CHECK_THROWS_AS(resum_generator(g, 0.1, 0.1, {0.5, 0.5, 0.1}), Error);
}

TEST_CASE("dressing is a *-automorphism") {
  std::mt19937_64 rng(8);
  const Matrix s = oracle::random_hermitian(8, rng);
  const Matrix id = Matrix::Identity(8, 8);
  CHECK(max_abs(apply_dressing(s, 0.0, 1, s) - s) <= 1e-14);
  CHECK(max_abs(apply_dressing(s, 0.3, 1, id) - id) <= 1e-13);
  for (int i = 0; i < 50; ++i) {
    const Matrix a = oracle::random_matrix(8, rng), b = oracle::random_matrix(8, rng);
    const Matrix ba = apply_dressing(s, 0.3, 1, a);
    CHECK(std::abs(operator_norm(ba) - operator_norm(a)) <= 1e-10 * operator_norm(a));
    CHECK(max_abs(apply_dressing(s, 0.3, 1, a * b) - ba * apply_dressing(s, 0.3, 1, b)) <= 1e-10 * operator_norm(a) * operator_norm(b));
    CHECK(max_abs(apply_dressing(s, 0.3, 1, a.adjoint()) - ba.adjoint()) <= 1e-12 * operator_norm(a));
  }
  CHECK(max_abs(apply_dressing(s, 0.3, -1, apply_dressing(s, 0.3, 1, s + id)) - (s + id)) <= 1e-12);
}

TEST_CASE("NEASS expectations") {
  const Chain c = chain(2, switching::Ramp{0.0, 1.0, 0.0, 1.0}, true);
  GeneratorOptions opt;
  opt.order = 2;
  opt.mu = 0.5;
  opt.orientation = pinned_orientation();
  const NeassGenerator g = build_generators(c.h, 0.5, opt);
  const LiouvillianContext ctx(c.h.h0(0.5));
  const NeassState st(ctx.ground(), g.S(0.05), 0.05, opt.orientation);
  CHECK(st.expectation(c.space.identity()).real() == doctest::Approx(1.0).epsilon(1e-13));
  std::mt19937_64 rng(12);
  for (int i = 0; i < 20; ++i) {
    const Matrix a = oracle::random_matrix(c.space.dim(), rng);
    const cplx v = st.expectation(a.adjoint() * a);
    CHECK(v.real() >= 0.0);
    CHECK(std::abs(v.imag()) <= 1e-12 * std::abs(v));
    // Π(A) = ρ₀(β[A])
    const Matrix ba = apply_dressing(g.S(0.05), 0.05, opt.orientation, a);
    CHECK(std::abs(st.expectation(a) - ctx.ground_state()(ba)) <= 1e-12 * operator_norm(a));
  }
}

TEST_CASE("Kubo coefficient") {
  const Chain c = chain(1, switching::Constant{1.0}, false);
  const Matrix h0 = c.h.h0(0.0), v = c.h.v(0.0);
  const LiouvillianContext ctx(h0);
  const int sigma = pinned_orientation();
  CHECK(std::abs(kubo_coefficient(ctx, v, c.space.identity(), sigma)) <= 1e-14);
  CHECK(std::abs(kubo_coefficient(ctx, v, h0, sigma)) <= 1e-12);
  const Matrix ax = annihilation_op(c.space, 0, 0).matrix();
  const Matrix ay = annihilation_op(c.space, 1, 0).matrix();
  const Matrix n0 = ax.adjoint() * ax;
  const Matrix bond = ax.adjoint() * ay + ay.adjoint() * ax;
  for (const Matrix& a : {n0, bond}) {
    const double ref = oracle::perturbed_ground_slope(h0, v, a);
    CHECK(kubo_coefficient(ctx, v, a, sigma) == doctest::Approx(ref).epsilon(1e-5));
  }
}

TEST_CASE("generator dumps round-trip") {
  const Chain c = chain(1, switching::Ramp{0.0, 1.0, 0.0, 1.0}, true);
  GeneratorOptions opt;
  opt.order = 2;
  opt.mu = 0.3;
  opt.orientation = pinned_orientation();
  const NeassGenerator g = build_generators(c.h, 0.5, opt);
  std::stringstream ss;
  write_generator_dump(ss, g);
  const NeassGenerator back = read_generator_dump(ss);
  CHECK(back.order == g.order);
  CHECK(back.mu == g.mu);
  CHECK(back.orientation == g.orientation);
  REQUIRE(back.A.size() == g.A.size());
  for (std::size_t j = 0; j < g.A.size(); ++j) CHECK(max_abs(back.A[j] - g.A[j]) == 0.0);
  std::stringstream bad("garbage\n");
  CHECK_THROWS_AS(read_generator_dump(bad), Error);
}
