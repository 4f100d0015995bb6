#include "support.hpp"

#include "spincm/errors.hpp"
#include "spincm/lax.hpp"
#include "spincm/phase.hpp"

#include <doctest.h>

using namespace spincm;
using spincm::test::max_abs;

TEST_CASE("make_state accepts a single unit-spin particle") {
  const PhaseState s = test::single_pole_state(0.0, 0.5);
  CHECK(s.n_particles() == 1);
  CHECK(s.spin_dim() == 1);
  CHECK(constraint_drift(s) == 0.0);
}

TEST_CASE("make_state rejects colliding poles") {
  CVector x(2), p = CVector::Zero(2);
  x << 0.0, 1e-9;
  CMatrix a = CMatrix::Ones(2, 1), b = CMatrix::Ones(2, 1);
  CHECK_THROWS_AS(make_state(x, p, a, b), CollidingPoles);
  Tolerances loose;
  loose.collision = 1e-12;
  CHECK_NOTHROW(make_state(x, p, a, b, loose));
}

TEST_CASE("make_state rejects a violated constraint") {
  CVector x(1), p(1);
  x << 0.0;
  p << 0.0;
  CMatrix a(1, 1), b(1, 1);
  a << 2.0;
  b << 1.0;
  try {
    make_state(x, p, a, b);
    FAIL("expected ConstraintViolated");
  } catch (const ConstraintViolated& e) {
    CHECK(e.violation() == doctest::Approx(1.0));
  }
}

TEST_CASE("make_state rejects inconsistent shapes and non-finite data") {
  CVector x(2), p(1);
  x << 0.0, 1.0;
  p << 0.0;
  CMatrix a = CMatrix::Ones(2, 1), b = CMatrix::Ones(2, 1);
  CHECK_THROWS_AS(make_state(x, p, a, b), DimensionMismatch);

  CHECK_THROWS_AS(make_state(x, CVector::Zero(2), a, CMatrix::Ones(2, 2)), DimensionMismatch);

  CVector bad = CVector::Zero(2);
  bad[1] = Complex{std::nan(""), 0.0};
  CHECK_THROWS_AS(make_state(x, bad, a, b), NonFiniteValue);
}

TEST_CASE("random_state is deterministic for a fixed seed") {
  const PhaseState s1 = random_state(3, 2, 7);
  const PhaseState s2 = random_state(3, 2, 7);
  CHECK(s1.x == s2.x);
  CHECK(s1.p == s2.p);
  CHECK(s1.a == s2.a);
  CHECK(s1.b == s2.b);
  const PhaseState s3 = random_state(3, 2, 8);
  CHECK(s1.x != s3.x);
}

TEST_CASE("random_state satisfies the constraint and the requested separation") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const int n = 1 + static_cast<int>(seed % 5);
    const int spin = 1 + static_cast<int>((seed / 5) % 3);
    RandomStateOptions opts;
    opts.separation = 0.5 + 0.01 * static_cast<double>(seed % 17);
    const PhaseState s = random_state(n, spin, seed, opts);
    CAPTURE(seed);
    CHECK(constraint_drift(s) <= 1e-14);
    CHECK(min_separation(s) >= opts.separation);
    CHECK_NOTHROW(validate(s));
  }
}

TEST_CASE("random_state argument checks") {
  CHECK_THROWS_AS(random_state(0, 2, 1), DimensionMismatch);
  CHECK_THROWS_AS(random_state(2, 0, 1), DimensionMismatch);
  RandomStateOptions opts;
  opts.separation = 0.0;
  CHECK_THROWS_AS(random_state(2, 2, 1, opts), std::invalid_argument);
  // A floor above every reachable |b^T a| exhausts the retries.
  opts = {};
  opts.pairing_floor = 10.0;
  CHECK_THROWS_AS(random_state(2, 2, 1, opts), DegenerateDraw);
}

TEST_CASE("gauge_rescale") {
  const PhaseState s = random_state(4, 3, 11);

  SUBCASE("unit scales are the identity") {
    const PhaseState g = gauge_rescale(s, CVector::Ones(4));
    CHECK(g.a == s.a);
    CHECK(g.b == s.b);
    CHECK(g.x == s.x);
    CHECK(g.p == s.p);
  }

  CVector lambda(4);
  lambda << Complex{2.0, 0.5}, Complex{-0.3, 1.1}, Complex{0.7, 0.0}, Complex{0.0, -1.9};
  const PhaseState g = gauge_rescale(s, lambda);

  SUBCASE("constraint is preserved") { CHECK(constraint_drift(g) <= 1e-14); }

  SUBCASE("L conjugates by diag(lambda)") {
    const CMatrix L = build_lax(s).L;
    const CMatrix Lg = build_lax(g).L;
    const CMatrix D = lambda.asDiagonal();
    const CMatrix expected = D.inverse() * L * D;
    CHECK(max_abs(Lg - expected) <= 1e-12 * std::max(1.0, max_abs(L)));
  }

  SUBCASE("Hamiltonians are unchanged against direct recomputation") {
    for (int m = 1; m <= 5; ++m) {
      const Complex h = hamiltonian(s, m);
      CHECK(std::abs(hamiltonian(g, m) - h) <= 1e-12 * std::max(1.0, std::abs(h)));
    }
  }

  SUBCASE("zero scale is rejected") {
    lambda[2] = 0.0;
    CHECK_THROWS_AS(gauge_rescale(s, lambda), ZeroScale);
    CHECK_THROWS_AS(gauge_rescale(s, CVector::Ones(3)), DimensionMismatch);
  }
}

TEST_CASE("TimeVector::xi sums t_k z^k") {
  TimeVector t;
  t.t = CVector(3);
  t.t << 1.0, Complex{0.0, 2.0}, -0.5;
  const Complex z{0.3, -0.4};
  const Complex expected = 1.0 * z + Complex{0.0, 2.0} * z * z - 0.5 * z * z * z;
  CHECK(std::abs(t.xi(z) - expected) <= 1e-15);
  CHECK(TimeVector{}.xi(z) == Complex{});
}
