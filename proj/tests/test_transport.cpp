#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "logff/errors.hpp"
#include "logff/fixtures.hpp"
#include "logff/transport.hpp"

using namespace logff;

namespace {

// log(1 + p u) / p as an exact truncated series; the omitted tail has
// valuation far above any precision used here.
ExactRational log_over_p(std::int64_t p, std::int64_t u) {
  ExactRational pu(static_cast<long>(p * u));
  ExactRational power(1), sum(0);
  for (long c = 1; c <= 80; ++c) {
    power *= pu;
    ExactRational term = power / ExactRational(c);
    sum += (c % 2 ? term : -term);
  }
  return sum / ExactRational(static_cast<long>(p));
}

std::vector<NamedFixture> small_grid() {
  std::vector<NamedFixture> out;
  for (std::int64_t p : {3, 5})
    for (int n : {1, 2})
      for (int d : {1, 2})
        for (int s = 0; s <= d; ++s) out.push_back(grid_fixture(p, n, d, s, 2 + (d + s) % 2, 99, n - 1));
  return out;
}

}  // namespace

TEST_CASE("NIL2 gluing matches the logarithm series") {
  for (std::int64_t p : {3, 5, 7})
    for (int n : {1, 2, 3}) {
      NamedFixture f = nil2(p, n);
      const auto& lifts = f.file.lifts;
      for (std::size_t i = 0; i < lifts.size(); ++i)
        for (std::size_t j = 0; j < lifts.size(); ++j) {
          const FrobLift& l1 = lifts[i].second;
          const FrobLift& l2 = lifts[j].second;
          GlueMap g = glue_map(f.file.module.filtered, l1, l2);
          std::int64_t u1 = l1.u()[0].coefficient(Exponent{}), u2 = l2.u()[0].coefficient(Exponent{});
          std::int64_t expected = reduce_mod(log_over_p(p, u1) - log_over_p(p, u2), f.file.module.spec().modulus());
          const RingSpec& spec = f.file.module.spec();
          CHECK(g.G.at(0, 0) == RingElem::constant(spec, 1));
          CHECK(g.G.at(1, 1) == RingElem::constant(spec, 1));
          CHECK(g.G.at(1, 0).is_zero());
          CHECK_MESSAGE(g.G.at(0, 1) == RingElem::constant(spec, expected), "p=" << p << " n=" << n);
        }
    }
}

TEST_CASE("pinned NIL2 values") {
  CHECK(glue_map(nil2(5, 1).file.module.filtered, nil2(5, 1).file.lift("Phi"), nil2(5, 1).file.lift("Psi")).G.str() ==
        "[[1, 4], [0, 1]]");
  NamedFixture f = nil2(5, 2);
  CHECK(glue_map(f.file.module.filtered, f.file.lift("Phi"), f.file.lift("Psi")).G.str() == "[[1, 14], [0, 1]]");
}

TEST_CASE("identity and cocycle") {
  for (int n : {1, 2}) {
    NamedFixture f = nil2(5, n);
    const FilteredModule& m = f.file.module.filtered;
    for (const auto& [name, l] : f.file.lifts) CHECK(check_glue_identity(m, l));
    CHECK(check_glue_cocycle(m, f.file.lift("Phi"), f.file.lift("Psi"), f.file.lift("Xi")));
    CHECK(check_glue_cocycle(m, f.file.lift("Xi"), f.file.lift("Phi"), f.file.lift("Psi")));
  }
  for (const NamedFixture& f : small_grid()) {
    const auto& ls = f.file.lifts;
    CHECK_MESSAGE(check_glue_cocycle(f.file.module.filtered, ls[0].second, ls[1].second, ls[2].second), f.name);
  }
}

TEST_CASE("linearity over the ring") {
  NamedFixture f = nil2(5, 2);
  const RingSpec& spec = f.file.module.spec();
  for (const RingElem& r : {RingElem::constant(spec, 1), RingElem::constant(spec, 7), RingElem::variable(spec, 0),
                            RingElem::variable(spec, 0).pow(3).scaled(2) + RingElem::constant(spec, 1)})
    CHECK(check_glue_linearity(f.file.module.filtered, f.file.lift("Phi"), f.file.lift("Xi"), r));
}

TEST_CASE("gluing is horizontal") {
  for (const NamedFixture& f : small_grid()) {
    const auto& ls = f.file.lifts;
    CHECK_MESSAGE(check_glue_horizontal(f.file.module.filtered, ls[0].second, ls[2].second), f.name);
  }
}

TEST_CASE("parallel and serial gluing agree") {
  for (const NamedFixture& f : small_grid()) {
    const auto& ls = f.file.lifts;
    const RingMap& g1 = ls[0].second.as_map();
    const RingMap& g2 = ls[2].second.as_map();
    GlueMap a = glue_map(f.file.module.filtered, g1, g2);
    GlueMap b = glue_map_serial(f.file.module.filtered, g1, g2);
    CHECK(a.G == b.G);
    CHECK(a.shells_used == b.shells_used);
    CHECK(a.last_nonzero_shell == b.last_nonzero_shell);
  }
}

TEST_CASE("transport round trip") {
  for (const NamedFixture& f : small_grid()) {
    const LogFFModule& m = f.file.module;
    for (const auto& [name, l] : f.file.lifts) {
      LogFFModule t = transport(m, l);
      CHECK(t.lift == l);
      for (const auto& r : check_module(t)) CHECK_MESSAGE(r.passed(), f.name << " -> " << name << ": " << r.name);
      CHECK(transport(t, m.lift) == m);
    }
  }
}

TEST_CASE("mutated Frobenius fails horizontality") {
  NamedFixture f = nil2(5, 1);
  LogFFModule m = f.file.module;
  m.frobenius.at(0, 1) = RingElem::variable(m.spec(), 0);
  CHECK(check_horizontal(m).verdict == Verdict::Fail);
}

TEST_CASE("Griffiths violation makes the series non-integral") {
  for (const NamedFixture& f : negative_controls())
    if (f.expected_failure == "griffiths")
      CHECK_THROWS_AS(glue_map(f.file.module.filtered, f.file.lift("Phi"), f.file.lift("Psi")), NonIntegral);
}

TEST_CASE("pullback along the identity and rescalings") {
  for (const NamedFixture& f : small_grid()) {
    const LogFFModule& m = f.file.module;
    const RingSpec& spec = m.spec();
    CHECK(pullback_ff(m, RingMap::identity(spec), m.lift, m.lift) == m);
    std::vector<std::int64_t> c(static_cast<std::size_t>(spec.d()), 2), c2(static_cast<std::size_t>(spec.d()), 4);
    RingMap f1 = RingMap::rescaling(spec, c), f2 = RingMap::rescaling(spec, c2);
    const FrobLift& l0 = f.file.lifts[0].second;
    const FrobLift& l1 = f.file.lifts[1].second;
    const FrobLift& l2 = f.file.lifts[2].second;
    CHECK_MESSAGE(check_pullback_functorial(m, f1, f2, l0, l1, l2), f.name);
    LogFFModule pb = pullback_ff(m, f1, l0, l1);
    for (const auto& r : check_module(pb)) CHECK_MESSAGE(r.passed(), f.name << ": " << r.name);
  }
}

TEST_CASE("pullback connection along a rescaling is unchanged for constant A") {
  NamedFixture f = nil2(5, 2);
  RingMap sigma = RingMap::rescaling(f.file.module.spec(), {3});
  CHECK(pullback_connection(f.file.module.filtered, sigma) == f.file.module.filtered.connection);
}

TEST_CASE("log and non-log formulas agree away from the divisor") {
  for (const NamedFixture& f : small_grid()) {
    if (f.file.module.spec().s() != 0) continue;
    const auto& ls = f.file.lifts;
    CHECK_MESSAGE(check_nonlog_agreement(f.file.module.filtered, ls[0].second, ls[2].second), f.name);
  }
}

TEST_CASE("rescaling invariance") {
  for (const NamedFixture& f : small_grid()) {
    const auto& ls = f.file.lifts;
    std::vector<std::int64_t> units(static_cast<std::size_t>(f.file.module.spec().d()), 2);
    CHECK_MESSAGE(check_rescaling_invariance(f.file.module.filtered, units, ls[0].second, ls[1].second), f.name);
  }
}

TEST_CASE("lift recovery from a map") {
  std::mt19937_64 rng(31);
  RingSpec spec(5, 2, 2, 1);
  FrobLift l = random_lift(spec, rng);
  CHECK(lift_from_map(l.as_map()) == l);
  CHECK_THROWS_AS(lift_from_map(RingMap::identity(spec)), IllegalMap);
}

TEST_CASE("zero connection glues to the identity") {
  RingSpec spec(5, 2, 2, 1);
  FilteredModule m;
  m.spec = spec;
  m.a = 0;
  m.b = 2;
  m.basis = {{"e0", 0, 2}, {"e1", 1, 2}, {"e2", 2, 2}};
  m.connection = {Matrix(spec, 3, 3), Matrix(spec, 3, 3)};
  std::mt19937_64 rng(53);
  CHECK(glue_map(m, random_lift(spec, rng), random_lift(spec, rng)).G == Matrix::identity(spec, 3));
}

TEST_CASE("transport of NIL2 from Psi to Phi") {
  NamedFixture f = nil2(5, 1);
  LogFFModule m = f.file.module;
  m.lift = f.file.lift("Psi");
  LogFFModule t = transport(m, f.file.lift("Phi"));
  CHECK(t.frobenius.str() == "[[1, 4], [0, 1]]");
  CHECK(transport(m, m.lift) == m);
}
