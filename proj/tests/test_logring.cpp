#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "logff/errors.hpp"
#include "logff/ffcoeff.hpp"
#include "logff/fixtures.hpp"
#include "logff/logring.hpp"

using namespace logff;

namespace {

Exponent ex(std::initializer_list<int> v) {
  Exponent e{};
  int i = 0;
  for (int x : v) e[static_cast<std::size_t>(i++)] = x;
  return e;
}

mpz_class binom(long n, long k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

const std::vector<RingSpec> kSpecs{RingSpec(3, 1, 1, 1), RingSpec(5, 2, 1, 0), RingSpec(3, 2, 2, 1),
                                   RingSpec(5, 1, 2, 2), RingSpec(7, 2, 3, 1)};

}  // namespace

TEST_CASE("ring spec legality") {
  RingSpec spec(5, 2, 2, 1);
  CHECK(spec.legal(ex({1, -3})));
  CHECK_FALSE(spec.legal(ex({-1, 0})));
  CHECK_FALSE(spec.legal(ex({0, 0, 1})));
  CHECK(spec.is_unit_monomial(ex({0, 4})));
  CHECK_FALSE(spec.is_unit_monomial(ex({1, 0})));
  CHECK_THROWS(RingSpec(5, 2, 2, 3));
  CHECK_THROWS(RingSpec(5, 2, 7, 0));
}

TEST_CASE("shell sizes are binomial") {
  for (int d = 1; d <= 4; ++d)
    for (int c = 0; c <= 7; ++c) {
      auto sh = shell(d, c);
      CHECK(mpz_class(static_cast<long>(sh.size())) == binom(c + d - 1, d - 1));
      for (const auto& i : sh) CHECK(i.order() == c);
      for (std::size_t k = 1; k < sh.size(); ++k) CHECK(sh[k] < sh[k - 1]);
    }
}

TEST_CASE("ring axioms on random elements") {
  std::mt19937_64 rng(7);
  for (const RingSpec& spec : kSpecs)
    for (int trial = 0; trial < 20; ++trial) {
      RingElem a = random_element(spec, rng, 4), b = random_element(spec, rng, 4), c = random_element(spec, rng, 4);
      CHECK(a * (b + c) == a * b + a * c);
      CHECK((a * b) * c == a * (b * c));
      CHECK(a * b == b * a);
      CHECK(a - a == RingElem(spec));
      CHECK(a.pow(3) == a * a * a);
      CHECK(a * RingElem::constant(spec, 1) == a);
    }
}

TEST_CASE("coefficients wrap modulo p^n") {
  RingSpec spec(5, 2, 1, 1);
  RingElem x = RingElem::monomial(spec, ex({2}), 30);
  CHECK(x.coefficient(ex({2})) == 5);
  CHECK(x.scaled(5).is_zero());
  CHECK(x.divided_by_p() == RingElem::monomial(spec.at_precision(1), ex({2}), 1));
  CHECK_THROWS_AS(RingElem::monomial(spec, ex({1}), 2).divided_by_p(), NonIntegral);
  CHECK_THROWS_AS(RingElem::variable(spec, 0).shifted(ex({-2})), IllegalMap);
  CHECK(x.at_precision(1).is_zero());
}

TEST_CASE("log derivative satisfies Leibniz") {
  std::mt19937_64 rng(11);
  for (const RingSpec& spec : kSpecs)
    for (int trial = 0; trial < 20; ++trial) {
      RingElem a = random_element(spec, rng, 4), b = random_element(spec, rng, 4);
      for (int j = 0; j < spec.d(); ++j) CHECK(log_derive(a * b, j) == log_derive(a, j) * b + a * log_derive(b, j));
    }
  RingSpec spec(5, 1, 2, 1);
  CHECK(log_derive(RingElem::monomial(spec, ex({3, -2}), 1), 1) == RingElem::monomial(spec, ex({3, -2}), -2));
}

TEST_CASE("falling operator on a monomial is a falling factorial") {
  RingSpec spec(7, 2, 2, 0);
  RingElem t = RingElem::monomial(spec, ex({4, -3}), 1);
  MultiIndex i{{2, 3}};
  mpz_class f = falling_factorial(4, 2) * falling_factorial(-3, 3);
  CHECK(falling_op(t, i) == t.scaled(spec.modulus().reduce(f)));
}

TEST_CASE("1 + p t inverse") {
  std::mt19937_64 rng(3);
  for (const RingSpec& spec : kSpecs) {
    RingElem t = random_element(spec, rng, 3);
    RingElem w = RingElem::constant(spec, 1) + t.scaled(spec.p());
    CHECK(w * one_plus_p_inverse(t, spec.n()) == RingElem::constant(spec, 1));
  }
}

TEST_CASE("ring maps are homomorphisms") {
  std::mt19937_64 rng(5);
  for (const RingSpec& spec : kSpecs) {
    FrobLift lift = random_lift(spec, rng);
    const RingMap& f = lift.as_map();
    for (int trial = 0; trial < 10; ++trial) {
      RingElem a = random_element(spec, rng, 3), b = random_element(spec, rng, 3);
      CHECK(f.apply(a * b) == f.apply(a) * f.apply(b));
      CHECK(f.apply(a + b) == f.apply(a) + f.apply(b));
    }
    // Frobenius images reduce to T^p mod p.
    for (int j = 0; j < spec.d(); ++j)
      CHECK(f.image(j, 1) == RingElem::variable(spec.at_precision(1), j).pow(static_cast<unsigned>(spec.p())));
    RingMap composite = RingMap::identity(spec).then(f);
    for (int j = 0; j < spec.d(); ++j) CHECK(composite.image(j, spec.n() + 1) == f.image(j, spec.n() + 1));
  }
}

TEST_CASE("composition of rescalings") {
  RingSpec spec(5, 2, 2, 1);
  RingMap a = RingMap::rescaling(spec, {2, 3}), b = RingMap::rescaling(spec, {7, 4});
  CHECK(a.then(b) == RingMap::rescaling(spec, {14, 12}));
  RingElem x = RingElem::monomial(spec, ex({1, 2}), 1);
  CHECK(a.then(b).apply(x) == b.apply(a.apply(x)));
}

TEST_CASE("divided ratio of two lifts") {
  RingSpec spec(5, 2, 1, 1);
  FrobLift l1(spec, {RingElem::constant(spec, 1)});
  FrobLift l2 = FrobLift::standard(spec);
  auto x = divided_ratio(l1.as_map(), l2.as_map());
  REQUIRE(x.size() == 1);
  CHECK(x[0] == RingElem::constant(spec, 1));
  CHECK_THROWS_AS(divided_ratio(RingMap::identity(spec), l2.as_map()), LiftMismatch);
}

TEST_CASE("truncation bound dominates every later shell") {
  for (std::int64_t p : {3, 5, 7, 11})
    for (int n = 1; n <= 4; ++n)
      for (int width = 0; width <= p - 2; ++width) {
        int bound = truncation_bound(p, n, width);
        CHECK(bound >= width + (n * (p - 1) + p - 3) / (p - 2));
        for (long c = bound + 1; c <= bound + 300; ++c) CHECK(c - width - factorial_valp(c, p) >= n);
      }
}

TEST_CASE("Taylor formula reproduces a second lift") {
  std::mt19937_64 rng(13);
  for (const RingSpec& spec : kSpecs)
    for (int trial = 0; trial < 8; ++trial) {
      FrobLift l1 = random_lift(spec, rng), l2 = random_lift(spec, rng);
      RingElem r = random_element(spec, rng, 4);
      CHECK(taylor_residual(r, l1, l2).is_zero());
    }
}

TEST_CASE("string form") {
  RingSpec spec(5, 1, 2, 1);
  CHECK(RingElem(spec).str() == "0");
  CHECK(RingElem::constant(spec, 3).str() == "3");
  CHECK_FALSE(RingElem::monomial(spec, ex({1, -1}), 2).str().empty());
}

TEST_CASE("documented ring examples") {
  RingSpec r51(5, 1, 1, 1);
  RingElem t = RingElem::variable(r51, 0), one = RingElem::constant(r51, 1);
  CHECK((t + one) * (t - one) == t * t - one);
  CHECK(t.scaled(2) * t.scaled(3) == t * t);

  RingSpec r32(3, 2, 1, 1);
  FrobLift phi = FrobLift::standard(r32);
  RingElem x = RingElem::variable(r32, 0).scaled(2) + RingElem::constant(r32, 1);
  CHECK(apply_frobenius(x, phi) == RingElem::monomial(r32, ex({3}), 2) + RingElem::constant(r32, 1));
  CHECK(apply_frobenius(RingElem::constant(r32, 5), phi) == RingElem::constant(r32, 5));
  RingSpec l32(3, 2, 1, 0);
  FrobLift psi(l32, {RingElem::constant(l32, 1)});
  CHECK(apply_frobenius(RingElem::monomial(l32, ex({-1})), psi) == RingElem::monomial(l32, ex({-3}), 7));

  CHECK(log_derive(RingElem::monomial(r51, ex({4})), 0) == RingElem::monomial(r51, ex({4}), 4));
  CHECK(log_derive(RingElem::monomial(RingSpec(5, 1, 1, 0), ex({-2})), 0) ==
        RingElem::monomial(RingSpec(5, 1, 1, 0), ex({-2}), -2));
  CHECK(log_derive(RingElem::constant(r51, 7), 0).is_zero());

  RingSpec big(101, 1, 2, 2);
  CHECK(falling_op(RingElem::monomial(big, ex({4, 0})), MultiIndex{{2, 0}}) == RingElem::monomial(big, ex({4, 0}), 12));
  CHECK(falling_op(RingElem::monomial(big, ex({1, 0})), MultiIndex{{2, 0}}).is_zero());
  CHECK(falling_op(RingElem::monomial(big, ex({1, 1})), MultiIndex{{1, 1}}) == RingElem::monomial(big, ex({1, 1})));

  FrobLift u1(r32, {RingElem::constant(r32, 1)});
  CHECK(taylor_residual(RingElem::variable(r32, 0), phi, u1).is_zero());
  CHECK(taylor_residual(RingElem::constant(r32, 1), phi, u1).is_zero());
  CHECK(taylor_residual(RingElem::monomial(l32, ex({-1})), FrobLift::standard(l32), psi).is_zero());

  RingSpec src(5, 2, 1, 1);
  RingMap root = RingMap::from_images(src, src, {RingElem::monomial(src, ex({25}))});
  CHECK(root.apply(RingElem::variable(src, 0)) == RingElem::monomial(src, ex({25})));
  CHECK(RingMap::identity(r32).apply(x) == x);
  CHECK(RingMap::rescaling(r51, {2}).apply(t * t) == (t * t).scaled(4));

  RingElem y = t + one;
  RingElem ly = localize(y);
  CHECK(ly.spec() == RingSpec(5, 1, 1, 0));
  CHECK(ly.terms() == y.terms());
  CHECK(localize(ly) == ly);
  CHECK(ly * RingElem::monomial(ly.spec(), ex({-1})) == one.recast(ly.spec()) + RingElem::monomial(ly.spec(), ex({-1})));
}

TEST_CASE("Frobenius lifts reduce to the p-th power") {
  std::mt19937_64 rng(41);
  for (const RingSpec& spec : kSpecs) {
    FrobLift l = random_lift(spec, rng);
    RingSpec low = spec.at_precision(1);
    for (int trial = 0; trial < 100; ++trial) {
      RingElem r = random_element(spec, rng, 3);
      CHECK(apply_frobenius(r, l).at_precision(1) == r.at_precision(1).pow(static_cast<unsigned>(spec.p())));
      CHECK(low == r.at_precision(1).spec());
    }
  }
}

TEST_CASE("log derivations commute") {
  std::mt19937_64 rng(43);
  for (const RingSpec& spec : kSpecs)
    for (int trial = 0; trial < 20; ++trial) {
      RingElem r = random_element(spec, rng, 5);
      for (int i = 0; i < spec.d(); ++i)
        for (int j = 0; j < spec.d(); ++j) CHECK(log_derive(log_derive(r, i), j) == log_derive(log_derive(r, j), i));
    }
}

TEST_CASE("falling operators compose through the structure constants") {
  std::mt19937_64 rng(47);
  RingSpec spec(7, 2, 2, 1);
  for (int trial = 0; trial < 10; ++trial) {
    RingElem r = random_element(spec, rng, 4, 3);
    for (int c1 = 0; c1 <= 3; ++c1)
      for (int c2 = 0; c2 <= 3; ++c2)
        for (const MultiIndex& i : shell(2, c1))
          for (const MultiIndex& j : shell(2, c2)) {
            RingElem sum(spec);
            for (const auto& [k, a] : multi_structure_constants(i, j))
              sum += falling_op(r, k).scaled(spec.modulus().reduce(a));
            CHECK(falling_op(falling_op(r, j), i) == sum);
          }
  }
}
