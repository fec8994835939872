#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "logff/errors.hpp"
#include "logff/expr.hpp"
#include "logff/fixtures.hpp"
#include "logff/modfile.hpp"

using namespace logff;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures{LOGFF_FIXTURE_DIR};

Exponent ex(std::initializer_list<int> v) {
  Exponent e{};
  int i = 0;
  for (int x : v) e[static_cast<std::size_t>(i++)] = x;
  return e;
}

const char* kMinimal = R"({
  "ring": {"p": 5, "n": 1, "d": 1, "s": 1},
  "hodge_range": [0, 1],
  "lifts": {"Phi": ["0"]},
  "basis": [{"name": "e0", "level": 0}, {"name": "e1", "level": 1}],
  "connection": [[["0", "1"], ["0", "0"]]],
  "frobenius": {"lift": "Phi", "matrix": [["1", "0"], ["0", "1"]]}
})";

}  // namespace

TEST_CASE("expression syntax") {
  RingSpec spec(5, 2, 2, 1);
  RingElem a = parse_expression("3*T1^2*T2^-1 - 2", spec);
  CHECK(a.coefficient(ex({2, -1})) == 3);
  CHECK(a.coefficient(ex({0, 0})) == 23);
  CHECK(parse_expression("T_1*T_2^(-2)", spec) == parse_expression("T1 * T2^-2", spec));
  CHECK(parse_expression("-T2 + T2", spec).is_zero());
  CHECK(parse_expression("T1*T1", spec) == parse_expression("T1^2", spec));
  CHECK(parse_expression("26", spec) == RingElem::constant(spec, 1));
  for (const char* text : {"0", "1", "T1", "4*T1^3*T2^-2 + T2 + 7"}) {
    RingElem r = parse_expression(text, spec);
    CHECK(parse_expression(format_expression(r), spec) == r);
  }
}

TEST_CASE("expression errors carry a column") {
  RingSpec spec(5, 1, 2, 1);
  try {
    parse_expression("T2 + T1^-1", spec);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() >= 6);
  }
  CHECK_THROWS_AS(parse_expression("T3", spec), ParseError);
  CHECK_THROWS_AS(parse_expression("2**T1", spec), ParseError);
  CHECK_THROWS_AS(parse_expression("", spec), ParseError);
}

TEST_CASE("minimal module parses") {
  ModuleFile f = parse_module_file(kMinimal);
  CHECK(f.module.rank() == 2);
  CHECK(f.module.filtered.torsion(0) == 1);
  CHECK(f.frobenius_lift == "Phi");
  CHECK(f.module.lift == FrobLift::standard(f.module.spec()));
  CHECK_THROWS_AS(f.lift("nope"), PreconditionViolation);
}

TEST_CASE("serialization round trip over the corpus") {
  for (const auto& entry : fs::directory_iterator(kFixtures / "good")) {
    ModuleFile f = load_module_file(entry.path());
    std::string text = serialize_module_file(f);
    ModuleFile g = parse_module_file(text);
    CHECK_MESSAGE(g.module == f.module, entry.path());
    CHECK(g.lifts == f.lifts);
    CHECK(serialize_module_file(g) == text);
  }
  for (const NamedFixture& f : negative_controls()) {
    ModuleFile g = parse_module_file(serialize_module_file(f.file));
    CHECK(g.module == f.file.module);
  }
}

TEST_CASE("parse errors report line and column") {
  std::string text = kMinimal;
  text.replace(text.find("[\"0\"]"), 5, "[\"T1^-1\"]");
  try {
    parse_module_file(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(e.column() > 10);
    CHECK(std::string(e.what()).find("/lifts/Phi/0") != std::string::npos);
  }
  try {
    parse_module_file("{\n  \"ring\": [1,\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() >= 2);
  }
  CHECK_THROWS_AS(load_module_file(kFixtures / "bad" / "garbage.json"), ParseError);
  CHECK_THROWS_AS(load_module_file(kFixtures / "bad" / "divisor_negative_exponent.json"), ParseError);
}

TEST_CASE("missing keys and wrong shapes") {
  std::string no_ring = kMinimal;
  no_ring.replace(no_ring.find("\"ring\""), 6, "\"rink\"");
  CHECK_THROWS_AS(parse_module_file(no_ring), ParseError);
  std::string short_row = kMinimal;
  short_row.replace(short_row.find("[\"0\", \"1\"]"), 10, "[\"0\"]");
  CHECK_THROWS(parse_module_file(short_row));
}

TEST_CASE("Hodge width p - 1 needs the wide policy") {
  fs::path wide = kFixtures / "bad" / "wide_range_p3.json";
  CHECK_THROWS_AS(load_module_file(wide), InvariantViolation);
  ModuleFile f = load_module_file(wide, RangePolicy::Wide);
  CHECK(f.module.filtered.b - f.module.filtered.a == 2);
}

TEST_CASE("map files") {
  ModuleFile f = load_module_file(kFixtures / "good" / "nil2_p5_n1.json");
  MapFile root = load_map_file(kFixtures / "maps" / "root_depth1.json", f.module.spec());
  CHECK(root.source_lift == std::optional<std::string>("Phi"));
  CHECK_FALSE(root.target_lift.has_value());
  CHECK(root.map.slot(0).exponent[0] == 5);
  MapFile scale = load_map_file(kFixtures / "maps" / "rescale_by_2.json", f.module.spec());
  CHECK(scale.map == RingMap::rescaling(f.module.spec(), {2}));
  REQUIRE(scale.target_lift.has_value());
  CHECK(*scale.target_lift == FrobLift::standard(f.module.spec()));
  CHECK_THROWS_AS(parse_map_file(R"({"images": ["T1", "T1"]})", f.module.spec()), ParseError);
}
