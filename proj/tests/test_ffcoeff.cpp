#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "logff/ffcoeff.hpp"

using namespace logff;

namespace {

mpz_class binom(long n, long k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

// Signed Stirling numbers of the first kind by their recurrence.
mpz_class stirling1(int m, int k) {
  if (m == 0 && k == 0) return 1;
  if (m == 0 || k == 0) return 0;
  return stirling1(m - 1, k - 1) - (m - 1) * stirling1(m - 1, k);
}

}  // namespace

TEST_CASE("falling polynomials match Stirling numbers") {
  for (int m = 0; m <= 8; ++m) {
    FallingPoly f = falling_poly(m);
    CHECK(f.degree == m);
    for (int k = 0; k <= m; ++k) CHECK(f.coefficients[static_cast<std::size_t>(k)] == stirling1(m, k));
  }
}

TEST_CASE("falling basis round trip") {
  RationalPoly x3{0, 0, 0, 1};
  auto c = to_falling_basis(x3);  // X^3 = f_3 + 3 f_2 + f_1
  REQUIRE(c.size() >= 4);
  CHECK(c[1] == ExactRational(1));
  CHECK(c[2] == ExactRational(3));
  CHECK(c[3] == ExactRational(1));
}

TEST_CASE("structure constants agree with the closed form") {
  // f_m f_n = sum_j C(m,j) C(n,j) j! f_{m+n-j}
  for (int m = 0; m <= 8; ++m)
    for (int n = 0; n <= 8; ++n) {
      const CoeffTable& t = structure_constants(m, n);
      for (int k = 0; k <= m + n; ++k) {
        int j = m + n - k;
        mpz_class expected = (j <= std::min(m, n)) ? mpz_class(binom(m, j) * binom(n, j) * factorial(j)) : mpz_class(0);
        CHECK(t.at(k) == ExactRational(expected));
      }
    }
  CHECK(structure_constants(1, 1).at(1) == ExactRational(1));
  CHECK(structure_constants(1, 1).at(2) == ExactRational(1));
  CHECK(structure_constants(0, 0).entries.size() == 1);
}

TEST_CASE("multi-index constants are slotwise products") {
  MultiIndex i{{1, 2}}, j{{1, 1}};
  auto table = multi_structure_constants(i, j);
  for (const auto& [k, a] : table) {
    mpz_class expected = 1;
    for (int l = 0; l < 2; ++l) {
      ExactRational v = structure_constants(i.entries[l], j.entries[l]).at(k.entries[l]);
      expected *= v.value().get_num();
    }
    CHECK(a == expected);
  }
  CHECK(table.size() == 4);
}

TEST_CASE("generating-function identity") {
  for (int k = 0; k <= 6; ++k)
    for (int degree = 0; degree <= 6; ++degree) CHECK(verify_coeff_identity(k, degree));
}

TEST_CASE("documented examples") {
  CHECK(falling_poly(0).coefficients == std::vector<mpz_class>{1});
  CHECK(falling_poly(2).coefficients == std::vector<mpz_class>{0, -1, 1});
  CHECK(falling_poly(3).coefficients == std::vector<mpz_class>{0, 2, -3, 1});
  auto c = poly_trim(to_falling_basis(RationalPoly{0, 0, 1}));
  CHECK(c == RationalPoly{0, 1, 1});
  auto f5 = poly_trim(to_falling_basis(falling_poly(5).as_rational()));
  CHECK(f5 == RationalPoly{0, 0, 0, 0, 0, 1});
  CHECK(poly_trim(to_falling_basis(RationalPoly{7})) == RationalPoly{7});
  CHECK(structure_constants(1, 1).entries == std::map<int, ExactRational>{{1, 1}, {2, 1}});
  CHECK(structure_constants(1, 2).entries == std::map<int, ExactRational>{{2, 2}, {3, 1}});
  CHECK(structure_constants(4, 0).entries == std::map<int, ExactRational>{{4, 1}});
  CHECK(multi_structure_constants(MultiIndex{{1}}, MultiIndex{{1}}) ==
        std::map<MultiIndex, mpz_class>{{MultiIndex{{1}}, 1}, {MultiIndex{{2}}, 1}});
  CHECK(multi_structure_constants(MultiIndex{{1, 1}}, MultiIndex{{1, 0}}) ==
        std::map<MultiIndex, mpz_class>{{MultiIndex{{1, 1}}, 1}, {MultiIndex{{2, 1}}, 1}});
  CHECK(multi_structure_constants(MultiIndex{{0, 0}}, MultiIndex{{2, 1}}) ==
        std::map<MultiIndex, mpz_class>{{MultiIndex{{2, 1}}, 1}});
}

TEST_CASE("expansion reproduces products and the table is symmetric") {
  for (int m = 0; m <= 8; ++m)
    for (int n = 0; n <= 8; ++n) {
      const CoeffTable& t = structure_constants(m, n);
      RationalPoly sum;
      for (const auto& [k, a] : t.entries) {
        CHECK(k >= std::max(m, n));
        CHECK(k <= m + n);
        CHECK(a.is_integer());
        CHECK_FALSE(a < ExactRational(0));
        CHECK(structure_constants(n, m).at(k) == a);
        RationalPoly term = falling_poly(k).as_rational();
        if (sum.size() < term.size()) sum.resize(term.size());
        for (std::size_t i = 0; i < term.size(); ++i) sum[i] += a * term[i];
      }
      CHECK(t.at(m + n) == ExactRational(1));
      CHECK(poly_trim(sum) == poly_trim(poly_mul(falling_poly(m).as_rational(), falling_poly(n).as_rational())));
    }
}
