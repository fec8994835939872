#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "logff/fixtures.hpp"

namespace logff {

struct SelftestOptions {
  bool quick = false;  // n = 1 only
  std::uint64_t seed = 20240601;
};

struct SuiteResult {
  std::string id;
  std::string title;
  long cases = 0;
  long non_integral = 0;
  std::vector<std::string> failures;  // first few, in fixture order
  long failure_count = 0;
  double seconds = 0;

  bool passed() const { return failure_count == 0; }
};

/// Suite ids "A1".."A13" in order.
std::vector<std::string> selftest_suite_ids();
/// Grid of valid fixtures used by the suites.
std::vector<NamedFixture> selftest_grid(const SelftestOptions& options);
/// Runs one suite; A13 needs the NonIntegral counts of the others and is
/// only meaningful through run_selftest.
SuiteResult run_suite(const std::string& id, const SelftestOptions& options, const std::vector<NamedFixture>& grid);
std::vector<SuiteResult> run_selftest(const SelftestOptions& options);

}  // namespace logff
