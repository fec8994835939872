#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "logff/errors.hpp"
#include "logff/exactnum.hpp"

using namespace logff;

namespace {

// Extended Euclid, independent of the Euler-power inverse in Modulus.
std::int64_t euclid_inverse(std::int64_t a, std::int64_t m) {
  std::int64_t old_r = a, r = m, old_s = 1, s = 0;
  while (r != 0) {
    std::int64_t q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
  }
  return ((old_s % m) + m) % m;
}

long brute_factorial_valp(long m, std::int64_t p) {
  long v = 0;
  for (long k = 2; k <= m; ++k)
    for (long x = k; x % p == 0; x /= p) ++v;
  return v;
}

}  // namespace

TEST_CASE("prime check and modulus validation") {
  CHECK(is_prime(2));
  CHECK(is_prime(3));
  CHECK(is_prime(97));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(91));
  CHECK_THROWS(Modulus(4, 1));
  CHECK_THROWS(Modulus(2, 3));
  CHECK_THROWS(Modulus(5, 0));
  CHECK_THROWS(Modulus(3, 60));
  CHECK(Modulus(5, 2).value() == 25);
}

TEST_CASE("modular inverse agrees with extended Euclid") {
  for (std::int64_t p : {3, 5, 7, 11})
    for (int n : {1, 2, 3}) {
      Modulus mod(p, n);
      for (std::int64_t a = 1; a < mod.value(); ++a) {
        if (a % p == 0) {
          CHECK_THROWS_AS(mod.inverse(a), NonIntegral);
          continue;
        }
        CHECK(mod.inverse(a) == euclid_inverse(a, mod.value()));
        CHECK(mod.mul(a, mod.inverse(a)) == 1);
      }
    }
}

TEST_CASE("arithmetic mod p^n") {
  Modulus mod(5, 2);
  CHECK(mod.reduce(-1) == 24);
  CHECK(mod.reduce(mpz_class("1000000000000000000007")) == 7);
  CHECK(mod.reduce(mpz_class("-1000000000000000000007")) == 18);
  CHECK(mod.add(20, 10) == 5);
  CHECK(mod.sub(3, 10) == 18);
  CHECK(mod.neg(0) == 0);
  CHECK(mod.pow(2, 10) == 1024 % 25);
  CHECK(mod.valuation(0) == 2);
  CHECK(mod.valuation(5) == 1);
  CHECK(mod.valuation(7) == 0);
  CHECK(mod.p_power(1) == 5);
}

TEST_CASE("valuations") {
  CHECK(valp(ExactRational(0), 5) == std::nullopt);
  CHECK(*valp(ExactRational(mpz_class(50), mpz_class(3)), 5) == 2);
  CHECK(*valp(ExactRational(mpz_class(3), mpz_class(125)), 5) == -3);
  CHECK(*valp(mpz_class(81), 3) == 4);
  for (std::int64_t p : {3, 5, 7})
    for (long m = 0; m <= 60; ++m) CHECK(factorial_valp(m, p) == brute_factorial_valp(m, p));
}

TEST_CASE("rational reduction") {
  // 1/2 mod 25 is 13
  CHECK(reduce_mod(ExactRational(mpz_class(1), mpz_class(2)), 5, 2).value == 13);
  CHECK(reduce_mod(ExactRational(mpz_class(-1), mpz_class(6)), Modulus(5, 1)) == 4);
  CHECK_THROWS_AS(reduce_mod(ExactRational(mpz_class(1), mpz_class(5)), 5, 1), NonIntegral);
  // brute-force: x with den * x = num mod p^n
  Modulus mod(3, 3);
  for (long num = -20; num <= 20; ++num)
    for (long den : {1L, 2L, 4L, 5L, 7L, 10L}) {
      std::int64_t x = reduce_mod(ExactRational(mpz_class(num), mpz_class(den)), mod);
      CHECK(mod.mul(mod.reduce(den), x) == mod.reduce(num));
    }
}

TEST_CASE("exact rationals stay canonical") {
  ExactRational a(mpz_class(6), mpz_class(4));
  CHECK(a == ExactRational(mpz_class(3), mpz_class(2)));
  CHECK(a.str() == "3/2");
  CHECK((a - a).is_zero());
  CHECK((a * ExactRational(2)).is_integer());
  CHECK(factorial(10) == 3628800);
}

TEST_CASE("documented examples") {
  CHECK(*valp(ExactRational(mpz_class(6), mpz_class(5)), 3) == 1);
  CHECK(*valp(ExactRational(mpz_class(1), mpz_class(9)), 3) == -2);
  CHECK(factorial_valp(5, 5) == 1);
  CHECK(factorial_valp(4, 5) == 0);
  CHECK(factorial_valp(25, 5) == 6);
  CHECK(reduce_mod(ExactRational(mpz_class(10), mpz_class(3)), 5, 2).value == 20);
  CHECK(reduce_mod(ExactRational(mpz_class(10), mpz_class(3)), 5, 2).value == (10 * euclid_inverse(3, 25)) % 25);
}

TEST_CASE("Legendre against floor sums up to 200") {
  for (std::int64_t p : {3, 5, 7})
    for (long m = 0; m <= 200; ++m) {
      long s = 0;
      for (std::int64_t q = p; q <= m; q *= p) s += m / q;
      CHECK(factorial_valp(m, p) == s);
    }
}

TEST_CASE("reduction is a ring homomorphism on p-integral rationals") {
  std::mt19937_64 rng(101);
  const std::int64_t p = 5;
  Modulus mod(p, 3);
  auto draw = [&] {
    long num = static_cast<long>(rng() % 2001) - 1000;
    long den = static_cast<long>(rng() % 300) + 1;
    while (den % p == 0) ++den;
    return ExactRational(mpz_class(num), mpz_class(den));
  };
  for (int i = 0; i < 1000; ++i) {
    ExactRational a = draw(), b = draw();
    CHECK(reduce_mod(a * b, mod) == mod.mul(reduce_mod(a, mod), reduce_mod(b, mod)));
    CHECK(reduce_mod(a + b, mod) == mod.add(reduce_mod(a, mod), reduce_mod(b, mod)));
    if (!a.is_zero() && !b.is_zero()) {
      CHECK(*valp(a * b, p) == *valp(a, p) + *valp(b, p));
      if (!(a + b).is_zero()) CHECK(*valp(a + b, p) >= std::min(*valp(a, p), *valp(b, p)));
    }
  }
}
