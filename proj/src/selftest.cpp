#include "logff/selftest.hpp"

#include <chrono>
#include <functional>
#include <sstream>

#include "logff/errors.hpp"
#include "logff/ffcoeff.hpp"
#include "logff/transport.hpp"

namespace logff {

namespace {

constexpr std::size_t kKeptFailures = 8;

struct Tally {
  long cases = 0;
  long failures = 0;
  long non_integral = 0;
  std::vector<std::string> messages;

  void expect(bool ok, const std::string& what) {
    ++cases;
    if (ok) return;
    ++failures;
    if (messages.size() < kKeptFailures) messages.push_back(what);
  }
};

using Body = std::function<void(std::size_t, const NamedFixture&, std::mt19937_64&, Tally&)>;

std::mt19937_64 rng_for(std::uint64_t seed, const std::string& suite, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(std::hash<std::string>{}(suite)), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

/// Runs body once per fixture, in parallel; tallies are merged in fixture
/// order so the report does not depend on the schedule.
void fan_out(const std::vector<NamedFixture>& grid, const std::string& suite, std::uint64_t seed, SuiteResult& out,
             const Body& body) {
  std::vector<Tally> local(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::mt19937_64 rng = rng_for(seed, suite, i);
    try {
      body(i, grid[i], rng, local[i]);
    } catch (const NonIntegral& e) {
      ++local[i].non_integral;
      local[i].expect(false, grid[i].name + ": NonIntegral: " + e.what());
    } catch (const std::exception& e) {
      local[i].expect(false, grid[i].name + ": " + e.what());
    }
  }
  for (auto& t : local) {
    out.cases += t.cases;
    out.failure_count += t.failures;
    out.non_integral += t.non_integral;
    for (auto& msg : t.messages)
      if (out.failures.size() < kKeptFailures) out.failures.push_back(std::move(msg));
  }
}

std::vector<std::pair<const FrobLift*, const FrobLift*>> lift_pairs(const ModuleFile& f, bool ordered) {
  std::vector<std::pair<const FrobLift*, const FrobLift*>> out;
  for (std::size_t i = 0; i < f.lifts.size(); ++i)
    for (std::size_t k = ordered ? 0 : i + 1; k < f.lifts.size(); ++k)
      if (i != k) out.emplace_back(&f.lifts[i].second, &f.lifts[k].second);
  return out;
}

bool same_module(const LogFFModule& a, const LogFFModule& b) {
  if (!(a.lift == b.lift) || a.filtered.basis != b.filtered.basis) return false;
  for (std::size_t j = 0; j < a.filtered.connection.size(); ++j)
    if (first_difference(a.filtered.connection[j], b.filtered.connection[j], a.filtered.basis)) return false;
  return !first_difference(a.frobenius, b.frobenius, a.filtered.basis);
}

bool all_pass(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.passed()) return false;
  return true;
}

std::string failed_checks(const std::vector<CheckResult>& results) {
  std::string out;
  for (const auto& r : results)
    if (r.verdict == Verdict::Fail) out += (out.empty() ? "" : ",") + r.name;
  return out;
}

// A1: falling-factorial structure constants.
void suite_coefficients(SuiteResult& out, const std::vector<NamedFixture>& grid, std::uint64_t seed) {
  Tally t;
  for (int k = 0; k <= 6; ++k)
    for (int degree = 0; degree <= 6; ++degree)
      t.expect(verify_coeff_identity(k, degree), "coefficient identity k=" + std::to_string(k) + " N=" + std::to_string(degree));
  for (int m = 0; m <= 8; ++m)
    for (int n = 0; n <= 8; ++n) {
      RationalPoly lhs = poly_mul(falling_poly(m).as_rational(), falling_poly(n).as_rational());
      RationalPoly rhs;
      for (const auto& [k, a] : structure_constants(m, n).entries) {
        RationalPoly f = falling_poly(k).as_rational();
        if (rhs.size() < f.size()) rhs.resize(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) rhs[i] += a * f[i];
      }
      t.expect(poly_trim(lhs) == poly_trim(rhs), "f_m f_n expansion m=" + std::to_string(m) + " n=" + std::to_string(n));
    }
  out.cases += t.cases;
  out.failure_count += t.failures;
  out.failures = t.messages;

  // The same constants realized by the falling operators of a flat module.
  fan_out(grid, out.id, seed, out, [](std::size_t, const NamedFixture& f, std::mt19937_64& rng, Tally& tally) {
    const FilteredModule& m = f.file.module.filtered;
    if (m.spec.d() != 1 || m.rank() > 2) return;
    Vector v(static_cast<std::size_t>(m.rank()), RingElem(m.spec));
    for (auto& x : v) x = random_element(m.spec, rng, 2);
    for (int i = 0; i <= 3; ++i)
      for (int j = 0; j <= 3; ++j) {
        MultiIndex I{{i}}, J{{j}};
        Vector lhs = apply_falling_operator(m, I, apply_falling_operator(m, J, v));
        Vector rhs(v.size(), RingElem(m.spec));
        for (const auto& [K, a] : multi_structure_constants(I, J)) {
          Vector term = apply_falling_operator(m, K, v);
          for (std::size_t l = 0; l < v.size(); ++l) rhs[l] += term[l].scaled(m.spec.modulus().reduce(a));
        }
        bool ok = true;
        for (std::size_t l = 0; l < v.size(); ++l)
          ok = ok && lhs[l].at_precision(m.torsion(static_cast<int>(l))) == rhs[l].at_precision(m.torsion(static_cast<int>(l)));
        tally.expect(ok, f.name + ": operator identity fails for I=" + std::to_string(i) + " J=" + std::to_string(j));
      }
  });
}

// A2: logarithmic Taylor formula on the (p, n, d, s) grid.
void suite_taylor(SuiteResult& out, const SelftestOptions& options) {
  std::vector<NamedFixture> cells;
  std::vector<int> precisions = options.quick ? std::vector<int>{1} : std::vector<int>{1, 2, 3};
  for (std::int64_t p : {3, 5})
    for (int n : precisions)
      for (int d : {1, 2})
        for (int s = 0; s <= d; ++s) {
          NamedFixture cell;
          cell.name = "taylor_p" + std::to_string(p) + "_n" + std::to_string(n) + "_d" + std::to_string(d) + "_s" + std::to_string(s);
          cell.file.module.filtered.spec = RingSpec(p, n, d, s);
          cells.push_back(std::move(cell));
        }
  fan_out(cells, out.id, options.seed, out, [](std::size_t, const NamedFixture& cell, std::mt19937_64& rng, Tally& t) {
    const RingSpec& spec = cell.file.module.filtered.spec;
    FrobLift l1 = random_lift(spec, rng), l2 = random_lift(spec, rng);
    for (int i = 0; i < 100; ++i) {
      RingElem r = random_element(spec, rng, 1 + static_cast<int>(rng() % 4));
      t.expect(taylor_residual(r, l1, l2).is_zero(), cell.name + ": nonzero Taylor residual for r = " + r.str());
    }
  });
}

// A3 .. A8, A11, A13 over the fixture grid.
void suite_identity(SuiteResult& out, const std::vector<NamedFixture>& grid, std::uint64_t seed) {
  fan_out(grid, out.id, seed, out, [](std::size_t, const NamedFixture& f, std::mt19937_64&, Tally& t) {
    for (const auto& [name, l] : f.file.lifts)
      t.expect(check_glue_identity(f.file.module.filtered, l), f.name + ": alpha(" + name + "," + name + ") is not the identity");
  });
}

void suite_cocycle(SuiteResult& out, const std::vector<NamedFixture>& grid, std::uint64_t seed, int triples) {
  fan_out(grid, out.id, seed, out, [triples](std::size_t, const NamedFixture& f, std::mt19937_64& rng, Tally& t) {
    const FilteredModule& m = f.file.module.filtered;
    for (int i = 0; i < triples; ++i) {
      FrobLift l1 = random_lift(m.spec, rng), l2 = random_lift(m.spec, rng), l3 = random_lift(m.spec, rng);
      t.expect(check_glue_cocycle(m, l1, l2, l3), f.name + ": cocycle fails for triple " + std::to_string(i));
    }
  });
}

void suite_linearity(SuiteResult& out, const std::vector<NamedFixture>& grid, std::uint64_t seed, int samples) {
  fan_out(grid, out.id, seed, out, [samples](std::size_t, const NamedFixture& f, std::mt19937_64& rng, Tally& t) {
    const FilteredModule& m = f.file.module.filtered;
    for (auto [l1, l2] : lift_pairs(f.file, false)) {
      Matrix g = glue_map(m, *l1, *l2).G;
      for (int i = 0; i < samples; ++i) {
        RingElem r = random_element(m.spec, rng, 1 + static_cast<int>(rng() % 3));
        RingElem image = apply_frobenius(r, *l1);
        bool ok = true;
        for (int k = 0; k < m.rank() && ok; ++k) {
          Vector x(static_cast<std::size_t>(m.rank()), RingElem(m.spec));
          x[static_cast<std::size_t>(k)] = r;
          Vector direct = glue_apply(m, l1->as_map(), l2->as_map(), x, m.level(k));
          for (int l = 0; l < m.rank(); ++l)
            ok = ok && direct[static_cast<std::size_t>(l)] == (g.at(l, k) * image).at_precision(m.torsion(l)).at_precision(m.spec.n());
        }
        t.expect(ok, f.name + ": alpha(r e) != l1(r) alpha(e) for r = " + r.str());
      }
    }
  });
}

void suite_horizontal(SuiteResult& out, const std::vector<NamedFixture>& grid, std::uint64_t seed) {
  fan_out(grid, out.id, seed, out, [](std::size_t, const NamedFixture& f, std::mt19937_64& rng, Tally& t) {
    const FilteredModule& m = f.file.module.filtered;
    for (auto [l1, l2] : lift_pairs(f.file, true)) t.expect(check_glue_horizontal(m, *l1, *l2), f.name + ": alpha not parallel");
    FrobLift extra = random_lift(m.spec, rng);
    t.expect(check_glue_horizontal(m, f.file.module.lift, extra), f.name + ": alpha not parallel (random lift)");
  });
}

void suite_transport(SuiteResult& out, const std::vector<NamedFixture>& grid, std::uint64_t seed) {
  fan_out(grid, out.id, seed, out, [](std::size_t, const NamedFixture& f, std::mt19937_64& rng, Tally& t) {
    const LogFFModule& m = f.file.module;
    t.expect(all_pass(check_module(m)), f.name + ": input fails " + failed_checks(check_module(m)));
    std::vector<FrobLift> targets;
    for (const auto& [name, l] : f.file.lifts) targets.push_back(l);
    targets.push_back(random_lift(m.spec(), rng));
    for (const auto& target : targets) {
      LogFFModule moved = transport(m, target);
      auto results = check_module(moved);
      t.expect(all_pass(results), f.name + ": transported module fails " + failed_checks(results));
      t.expect(same_module(transport(moved, m.lift), m), f.name + ": double transport differs from the original");
    }
  });
}

void suite_nonlog(SuiteResult& out, const std::vector<NamedFixture>& grid, std::uint64_t seed) {
  fan_out(grid, out.id, seed, out, [](std::size_t, const NamedFixture& f, std::mt19937_64& rng, Tally& t) {
    const FilteredModule& m = f.file.module.filtered;
    if (m.spec.s() != 0) return;
    for (auto [l1, l2] : lift_pairs(f.file, true)) t.expect(check_nonlog_agreement(m, *l1, *l2), f.name + ": log and non-log alpha differ");
    FrobLift extra = random_lift(m.spec, rng);
    t.expect(check_nonlog_agreement(m, extra, f.file.module.lift), f.name + ": log and non-log alpha differ (random lift)");
  });
}

void suite_root_pullback(SuiteResult& out, const std::vector<NamedFixture>& grid, std::uint64_t seed) {
  Tally t;
  {
    NamedFixture n = nil2(5, 1);
    LogFFModule pulled = root_pullback(n.file.module, 1);
    bool zero = true;
    for (const auto& a : pulled.filtered.connection) zero = zero && a.is_zero();
    t.expect(zero, "nil2 p=5 n=1: pulled-back connection is not zero");
  }
  out.cases += t.cases;
  out.failure_count += t.failures;
  out.failures = t.messages;
  fan_out(grid, out.id, seed, out, [](std::size_t, const NamedFixture& f, std::mt19937_64&, Tally& tally) {
    const LogFFModule& m = f.file.module;
    for (int depth = m.spec().n(); depth <= m.spec().n() + 1; ++depth) {
      LogFFModule pulled = root_pullback(m, depth);
      bool zero = true;
      for (int j = 0; j < m.spec().s(); ++j) zero = zero && pulled.filtered.connection[static_cast<std::size_t>(j)].is_zero();
      tally.expect(zero, f.name + ": divisor-slot connection survives root pullback at depth " + std::to_string(depth));
      auto results = check_module(pulled);
      tally.expect(all_pass(results), f.name + ": root pullback fails " + failed_checks(results));
    }
    for (int precision = 1; precision < m.spec().n(); ++precision) {
      LogFFModule pulled = root_pullback(reduce_mod_pm(m, precision), precision);
      bool zero = true;
      for (int j = 0; j < m.spec().s(); ++j) zero = zero && pulled.filtered.connection[static_cast<std::size_t>(j)].is_zero();
      tally.expect(zero, f.name + ": divisor-slot connection survives root pullback mod p^" + std::to_string(precision));
    }
  });
}

/// Unit-monomial self-maps of a chart used for the functoriality corpus.
std::vector<RingMap> sample_maps(const RingSpec& spec, std::mt19937_64& rng) {
  std::vector<RingMap> maps;
  const std::int64_t p = spec.p();
  Modulus lifted(p, spec.n() + 1);
  auto unit = [&]() {
    std::int64_t c = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(lifted.value() - 1));
    return c % p == 0 ? c + 1 : c;
  };
  std::vector<std::int64_t> c1, c2;
  for (int j = 0; j < spec.d(); ++j) {
    c1.push_back(unit());
    c2.push_back(unit());
  }
  maps.push_back(RingMap::rescaling(spec, c1));
  maps.push_back(RingMap::rescaling(spec, c2));
  maps.push_back(RingMap::root_cover(spec, 1));
  // T_j |-> c T_j (1 + p h) with a random tail, and a monomial shear.
  RingSpec high = spec.at_precision(spec.n() + 1);
  std::vector<RingElem> tailed, sheared;
  for (int j = 0; j < spec.d(); ++j) {
    RingElem tail = random_element(spec, rng, 2, 1).at_precision(spec.n() + 1).scaled(p);
    tailed.push_back((RingElem::constant(high, 1) + tail).shifted(unit_exponent(j)).scaled(unit()));
    Exponent e = unit_exponent(j);
    if (j + 1 < spec.d() && !spec.is_divisor_slot(j + 1)) e[j + 1] = 1;
    if (!spec.is_divisor_slot(j)) e[j] = -1;
    sheared.push_back(RingElem::monomial(high, e, 1));
  }
  maps.push_back(RingMap::from_images(spec, spec, tailed));
  maps.push_back(RingMap::from_images(spec, spec, sheared));
  return maps;
}

void suite_functorial(SuiteResult& out, const std::vector<NamedFixture>& grid, std::uint64_t seed) {
  fan_out(grid, out.id, seed, out, [](std::size_t, const NamedFixture& f, std::mt19937_64& rng, Tally& t) {
    const LogFFModule& m = f.file.module;
    const RingSpec& spec = m.spec();
    LogFFModule same = pullback_ff(m, RingMap::identity(spec), m.lift, m.lift);
    t.expect(same_module(same, m), f.name + ": identity pullback changes the module");
    std::vector<RingMap> maps = sample_maps(spec, rng);
    int pairs = 0;
    for (std::size_t i = 0; i < maps.size(); ++i)
      for (std::size_t k = 0; k < maps.size(); ++k) {
        if (pairs >= 12) break;
        FrobLift l1 = random_lift(spec, rng), l2 = random_lift(spec, rng);
        t.expect(check_pullback_functorial(m, maps[i], maps[k], m.lift, l1, l2),
                 f.name + ": pullback along a composite differs, maps " + std::to_string(i) + "," + std::to_string(k));
        ++pairs;
      }
  });
}

void suite_structure(SuiteResult& out, const std::vector<NamedFixture>& grid, std::uint64_t seed) {
  Tally t;
  for (std::int64_t p : {3, 5, 7})
    for (int n : {1, 2}) {
      NamedFixture f = nil2(p, n);
      auto results = check_module(f.file.module);
      t.expect(all_pass(results), f.name + " fails " + failed_checks(results));
    }
  for (const auto& control : negative_controls()) {
    auto results = check_module(control.file.module);
    bool exact = true;
    for (const auto& r : results) exact = exact && ((r.verdict == Verdict::Fail) == (r.name == control.expected_failure));
    t.expect(exact, control.name + ": expected only " + control.expected_failure + " to fail, got [" + failed_checks(results) + "]");
  }
  out.cases += t.cases;
  out.failure_count += t.failures;
  out.failures = t.messages;

  fan_out(grid, out.id, seed, out, [](std::size_t, const NamedFixture& f, std::mt19937_64& rng, Tally& tally) {
    const FilteredModule& m = f.file.module.filtered;
    TildeModule tilde(m);
    for (int level = m.a; level < m.b; ++level) {
      // a random element of Fil^{level+1}
      Vector x(static_cast<std::size_t>(m.rank()), RingElem(m.spec));
      for (int k = 0; k < m.rank(); ++k)
        if (m.level(k) >= level + 1) x[static_cast<std::size_t>(k)] = random_element(m.spec, rng, 2);
      Vector low = tilde.embed(level, x);
      Vector high = tilde.embed(level + 1, x);
      bool ok = true;
      for (std::size_t k = 0; k < x.size(); ++k) ok = ok && low[k] == high[k].scaled(m.spec.p());
      tally.expect(ok, f.name + ": emb_" + std::to_string(level) + " != p emb_" + std::to_string(level + 1));
    }
    // checks passing at precision n pass at every lower precision
    for (int precision = 1; precision < m.spec.n(); ++precision) {
      auto results = check_module(reduce_mod_pm(f.file.module, precision));
      tally.expect(all_pass(results), f.name + ": reduction mod p^" + std::to_string(precision) + " fails " + failed_checks(results));
    }
  });
}

void suite_pinned(SuiteResult& out) {
  Tally t;
  NamedFixture f = nil2(5, 1);
  const RingSpec& spec = f.file.module.spec();
  GlueMap g = glue_map(f.file.module.filtered, f.file.lift("Phi"), f.file.lift("Psi"));
  t.expect(g.G == Matrix::constant(spec, {{1, 4}, {0, 1}}), "glue_map(NIL2, u=0, u=1) = " + g.G.str());
  out.cases += t.cases;
  out.failure_count += t.failures;
  out.failures = t.messages;
}

// A13: the tail of every series vanishes past the truncation bound.
void suite_truncation(SuiteResult& out, const std::vector<NamedFixture>& grid, std::uint64_t seed) {
  fan_out(grid, out.id, seed, out, [](std::size_t, const NamedFixture& f, std::mt19937_64&, Tally& t) {
    const FilteredModule& m = f.file.module.filtered;
    const FrobLift& l1 = f.file.module.lift;
    const FrobLift& l2 = f.file.lifts.back().second;
    GlueMap g = glue_map(m, l1, l2);
    for (int k = 0; k < m.rank(); ++k)
      for (int extra = 1; extra <= 2; ++extra) {
        Vector tail = glue_shell(m, l1.as_map(), l2.as_map(), k, g.shells_used + extra);
        bool zero = true;
        for (const auto& x : tail) zero = zero && x.is_zero();
        t.expect(zero, f.name + ": shell " + std::to_string(g.shells_used + extra) + " past the bound is nonzero");
      }
  });
}

const std::vector<std::pair<std::string, std::string>>& suite_titles() {
  static const std::vector<std::pair<std::string, std::string>> titles{
      {"A1", "falling-factorial coefficients"},
      {"A2", "logarithmic Taylor formula"},
      {"A3", "alpha for equal lifts is the identity"},
      {"A4", "cocycle condition"},
      {"A5", "compatibility with scalars"},
      {"A6", "alpha is parallel"},
      {"A7", "transport preserves validity and inverts"},
      {"A8", "log and non-log gluing agree"},
      {"A9", "root pullback kills log poles"},
      {"A10", "pullback functoriality"},
      {"A11", "structure checks and negative controls"},
      {"A12", "pinned NIL2 gluing matrix"},
      {"A13", "no NonIntegral across the grid"},
  };
  return titles;
}

}  // namespace

std::vector<std::string> selftest_suite_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, title] : suite_titles()) ids.push_back(id);
  return ids;
}

std::vector<NamedFixture> selftest_grid(const SelftestOptions& options) {
  GridOptions grid;
  grid.seed = options.seed;
  if (options.quick) grid.precisions = {1};
  return fixture_grid(grid);
}

SuiteResult run_suite(const std::string& id, const SelftestOptions& options, const std::vector<NamedFixture>& grid) {
  SuiteResult out;
  out.id = id;
  for (const auto& [sid, title] : suite_titles())
    if (sid == id) out.title = title;
  if (out.title.empty()) throw PreconditionViolation("unknown suite " + id);
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t seed = options.seed;
  try {
    if (id == "A1") suite_coefficients(out, grid, seed);
    else if (id == "A2") suite_taylor(out, options);
    else if (id == "A3") suite_identity(out, grid, seed);
    else if (id == "A4") suite_cocycle(out, grid, seed, options.quick ? 10 : 50);
    else if (id == "A5") suite_linearity(out, grid, seed, options.quick ? 20 : 100);
    else if (id == "A6") suite_horizontal(out, grid, seed);
    else if (id == "A7") suite_transport(out, grid, seed);
    else if (id == "A8") suite_nonlog(out, grid, seed);
    else if (id == "A9") suite_root_pullback(out, grid, seed);
    else if (id == "A10") suite_functorial(out, grid, seed);
    else if (id == "A11") suite_structure(out, grid, seed);
    else if (id == "A12") suite_pinned(out);
    else if (id == "A13") suite_truncation(out, grid, seed);
  } catch (const NonIntegral& e) {
    ++out.non_integral;
    ++out.failure_count;
    out.failures.push_back(std::string("NonIntegral: ") + e.what());
  } catch (const std::exception& e) {
    ++out.failure_count;
    out.failures.push_back(e.what());
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<SuiteResult> run_selftest(const SelftestOptions& options) {
  std::vector<NamedFixture> grid = selftest_grid(options);
  std::vector<SuiteResult> out;
  long non_integral = 0;
  for (const auto& id : selftest_suite_ids()) {
    out.push_back(run_suite(id, options, grid));
    non_integral += out.back().non_integral;
  }
  // A13 also covers every NonIntegral raised by the other suites.
  SuiteResult& last = out.back();
  ++last.cases;
  if (non_integral > 0) {
    ++last.failure_count;
    last.failures.push_back(std::to_string(non_integral) + " NonIntegral error(s) across the grid");
  }
  return out;
}

}  // namespace logff
