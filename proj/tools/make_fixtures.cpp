// Writes the fixture corpus: fixtures/good, fixtures/bad, fixtures/maps.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "logff/fixtures.hpp"

using namespace logff;
namespace fs = std::filesystem;

namespace {

void write(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  std::cout << path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("fixtures");
  fs::create_directories(root / "good");
  fs::create_directories(root / "bad");
  fs::create_directories(root / "maps");

  for (int n : {1, 2}) {
    NamedFixture f = nil2(5, n);
    write(root / "good" / (f.name + ".json"), serialize_module_file(f.file));
  }
  NamedFixture p3 = nil2(3, 1);
  write(root / "good" / (p3.name + ".json"), serialize_module_file(p3.file));
  struct Cell {
    std::int64_t p;
    int n, d, s, rank, variant;
  };
  for (Cell c : {Cell{3, 1, 1, 1, 2, 0}, Cell{5, 2, 1, 0, 3, 1}, Cell{5, 1, 2, 1, 3, 0}, Cell{5, 2, 2, 2, 2, 0},
                 Cell{3, 2, 2, 0, 3, 1}, Cell{5, 2, 2, 1, 3, 2}}) {
    NamedFixture f = grid_fixture(c.p, c.n, c.d, c.s, c.rank, GridOptions{}.seed, c.variant);
    write(root / "good" / (f.name + ".json"), serialize_module_file(f.file));
  }
  for (const auto& f : negative_controls()) write(root / "bad" / (f.name + ".json"), serialize_module_file(f.file));

  // Malformed inputs for the exit-code contract.
  write(root / "bad" / "garbage.json", "{ \"ring\": {\"p\": 5, \"n\": 1,, }\n");
  std::string nil2_text = serialize_module_file(nil2(5, 1).file);
  std::string negative = nil2_text;
  negative.replace(negative.find("\"1\""), 3, "\"T1^-1\"");
  write(root / "bad" / "divisor_negative_exponent.json", negative);
  // b - a = p - 1 = 2 at p = 3: rejected unless --mode wide-range.
  {
    RingSpec spec(3, 1, 1, 1);
    ModuleFile f;
    f.module.filtered = FilteredModule{spec, 0, 2, {{"e0", 0, 1}, {"e1", 1, 1}, {"e2", 2, 1}}, {Matrix(spec, 3, 3)}};
    f.module.lift = FrobLift::standard(spec);
    f.module.frobenius = Matrix::identity(spec, 3);
    f.lifts.emplace_back("Phi", f.module.lift);
    f.frobenius_lift = "Phi";
    write(root / "bad" / "wide_range_p3.json", serialize_module_file(f));
  }

  write(root / "maps" / "root_depth1.json",
        "{\n  \"images\": [\"T1^5\"],\n  \"source_lift\": \"Phi\"\n}\n");
  write(root / "maps" / "rescale_by_2.json",
        "{\n  \"images\": [\"2*T1\"],\n  \"source_lift\": \"Phi\",\n  \"target_lift\": [\"0\"]\n}\n");
  return 0;
}
