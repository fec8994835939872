#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "logff/modfile.hpp"

namespace logff {

struct NamedFixture {
  std::string name;
  ModuleFile file;
  std::string expected_failure;  // check that must fail; empty for good fixtures
};

/// Rank 2, d = s = 1, levels (0, 1), A_1 = [[0,1],[0,0]], F = identity over
/// u = 0 (lift "Phi"); further lifts "Psi" and "Xi" have u = 1 and u = 2.
NamedFixture nil2(std::int64_t p, int n);

/// Known-bad modules, each failing exactly one module check.
std::vector<NamedFixture> negative_controls();

/// Random element with up to `terms` monomials; exponents in [0, spread] on
/// divisor slots and [-spread, spread] on Laurent slots.
RingElem random_element(const RingSpec& spec, std::mt19937_64& rng, int terms, int spread = 2);
FrobLift random_lift(const RingSpec& spec, std::mt19937_64& rng, int terms = 3);

struct GridOptions {
  std::vector<std::int64_t> primes{3, 5};
  std::vector<int> precisions{1, 2};
  std::vector<int> dims{1, 2};
  int max_rank = 3;
  int variants = 3;  // variants with odd index use mixed torsion when n > 1
  std::uint64_t seed = 20240601;
};

/// One valid module per cell (p, n, d, s, rank): a constant nilpotent
/// connection with a commuting Frobenius, moved by a random filtered gauge
/// transformation and transported to a random lift.
std::vector<NamedFixture> fixture_grid(const GridOptions& options = {});

/// A single grid cell, deterministic in (options.seed, cell).
NamedFixture grid_fixture(std::int64_t p, int n, int d, int s, int rank, std::uint64_t seed, int variant = 0);

}  // namespace logff
